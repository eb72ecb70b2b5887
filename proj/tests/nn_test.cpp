/*
 * Copyright 2026 The slsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "slsim/error.hpp"
#include "slsim/nn/adam.hpp"
#include "slsim/nn/grad_check.hpp"
#include "slsim/nn/layers.hpp"
#include "slsim/rng.hpp"

using namespace slsim;
using namespace slsim::nn;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

// Direct quadruple loop, no shared code with the library kernel.
Tensor conv_oracle(const Tensor& in, const Conv2dParams& p) {
  const std::size_t co = p.weights.dim(0), ci = p.weights.dim(1), kh = p.weights.dim(2),
                    kw = p.weights.dim(3), s = p.stride;
  const std::size_t oh = (in.dim(1) - kh) / s + 1, ow = (in.dim(2) - kw) / s + 1;
  Tensor out({co, oh, ow});
  for (std::size_t o = 0; o < co; ++o)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = p.bias[o];
        for (std::size_t c = 0; c < ci; ++c)
          for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b)
              acc += p.weights[((o * ci + c) * kh + a) * kw + b] * in.at(c, y * s + a, x * s + b);
        out.at(o, y, x) = acc;
      }
  return out;
}

// Linear probe turning any tensor output into a scalar loss.
double probe(const Tensor& out, const Tensor& coeffs) {
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) acc += coeffs[i] * out[i];
  return acc;
}

}  // namespace

TEST(AvgPool, MeanOfBlock) {
  const Tensor out = avg_pool(Tensor::matrix({{1, 3}, {5, 7}}), {2, 2});
  ASSERT_EQ(out.shape(), (Shape{1, 1}));
  EXPECT_DOUBLE_EQ(out[0], 4.0);
}

TEST(AvgPool, UnitWindowIsIdentity) {
  Rng rng(3);
  const Tensor in = random_tensor({5, 7}, rng);
  EXPECT_EQ(avg_pool(in, {1, 1}), in);
}

TEST(AvgPool, BackwardSplitsEqually) {
  const Tensor g = avg_pool_backward(Tensor::matrix({{1}}), {2, 2});
  EXPECT_EQ(g, Tensor::matrix({{0.25, 0.25}, {0.25, 0.25}}));
}

TEST(AvgPool, NonDividingWindowNamesBothDims) {
  try {
    avg_pool(Tensor({40, 40}), {3, 3});
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("3x3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("40x40"), std::string::npos);
  }
}

TEST(AvgPool, PreservesMeanAndBackwardOfOnes) {
  Rng rng(11);
  for (PoolWindow w : {PoolWindow{1, 1}, PoolWindow{2, 4}, PoolWindow{4, 4}, PoolWindow{8, 8}}) {
    const Tensor in = random_tensor({8, 8}, rng);
    const Tensor out = avg_pool(in, w);
    EXPECT_NEAR(out.mean(), in.mean(), 1e-12);
    const Tensor g = avg_pool_backward(Tensor(out.shape(), 1.0), w);
    for (double v : g.values()) EXPECT_DOUBLE_EQ(v, 1.0 / static_cast<double>(w.h * w.w));
  }
}

TEST(Conv2d, IdentityKernel) {
  Rng rng(5);
  Conv2dParams p(1, 1, 1, 1);
  p.weights[0] = 1.0;
  const Tensor in = random_tensor({1, 4, 6}, rng);
  EXPECT_EQ(conv2d(in, p), in);
}

TEST(Conv2d, OnesKernelSums) {
  Conv2dParams p(1, 1, 2, 2);
  p.weights.fill(1.0);
  const Tensor out = conv2d(Tensor({1, 2, 2}, 1.0), p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0], 4.0);
}

TEST(Conv2d, KernelLargerThanInputThrows) {
  Conv2dParams p(1, 1, 5, 5);
  EXPECT_THROW(conv2d(Tensor({1, 4, 4}), p), DimensionError);
}

TEST(Conv2d, MatchesDirectLoopOracle) {
  Rng rng(17);
  // The 1x5x5 instance with two output channels and a 3x3 kernel.
  {
    Conv2dParams p(1, 2, 3, 3);
    p.weights = random_tensor(p.weights.shape(), rng);
    p.bias = random_tensor(p.bias.shape(), rng);
    const Tensor in = random_tensor({1, 5, 5}, rng);
    const Tensor got = conv2d(in, p), want = conv_oracle(in, p);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
  // Every geometry with H,W <= 8.
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng.below(8), w = 1 + rng.below(8);
    const std::size_t kh = 1 + rng.below(h), kw = 1 + rng.below(w);
    const std::size_t ci = 1 + rng.below(3), co = 1 + rng.below(3), s = 1 + rng.below(2);
    Conv2dParams p(ci, co, kh, kw, s);
    p.weights = random_tensor(p.weights.shape(), rng);
    p.bias = random_tensor(p.bias.shape(), rng);
    const Tensor in = random_tensor({ci, h, w}, rng);
    const Tensor got = conv2d(in, p), want = conv_oracle(in, p);
    ASSERT_EQ(got.shape(), want.shape());
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Conv2d, DeterministicBitIdentical) {
  Rng rng(23);
  Conv2dParams p(2, 3, 3, 3);
  p.weights = random_tensor(p.weights.shape(), rng);
  const Tensor in = random_tensor({2, 8, 8}, rng);
  const Tensor g = random_tensor({3, 6, 6}, rng);
  EXPECT_EQ(conv2d(in, p), conv2d(in, p));
  const auto a = conv2d_backward(in, g, p), b = conv2d_backward(in, g, p);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.input, b.input);
}

TEST(Dense, IdentityAndBiasOnly) {
  DenseParams p(3, 3);
  for (std::size_t i = 0; i < 3; ++i) p.weights.at(i, i) = 1.0;
  const Tensor x = Tensor::vector({1.5, -2.0, 0.25});
  EXPECT_EQ(dense(x, p), x);

  DenseParams q(4, 1);
  q.bias[0] = 3.0;
  EXPECT_DOUBLE_EQ(dense(Tensor::vector({9, -9, 1, 2}), q)[0], 3.0);
}

TEST(Dense, MatchesDotProducts) {
  Rng rng(29);
  DenseParams p(4, 2);
  p.weights = random_tensor({2, 4}, rng);
  p.bias = random_tensor({2}, rng);
  const Tensor x = random_tensor({4}, rng);
  const Tensor y = dense(x, p);
  for (std::size_t r = 0; r < 2; ++r) {
    double acc = p.bias[r];
    for (std::size_t c = 0; c < 4; ++c) acc += p.weights.at(r, c) * x[c];
    EXPECT_NEAR(y[r], acc, 1e-12);
  }
}

TEST(Dense, ShapeMismatchThrows) {
  DenseParams p(4, 2);
  EXPECT_THROW(dense(Tensor({3}), p), DimensionError);
}

TEST(Lstm, ZeroWeightsZeroState) {
  LstmParams p(3, 2);
  const auto c = lstm_cell(Tensor::vector({1, -2, 3}), LstmState::zeros(2), p);
  for (double v : c.next.h.values()) EXPECT_EQ(v, 0.0);
  for (double v : c.next.c.values()) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, ZeroWeightsCarriesHalfCell) {
  LstmParams p(1, 1);
  LstmState s{Tensor::vector({0.0}), Tensor::vector({1.0})};
  const auto c = lstm_cell(Tensor::vector({0.7}), s, p);
  EXPECT_DOUBLE_EQ(c.next.c[0], 0.5);
  EXPECT_NEAR(c.next.h[0], 0.5 * std::tanh(0.5), 1e-15);
  EXPECT_NEAR(c.next.h[0], 0.231059, 1e-6);
}

TEST(Lstm, ShapeMismatchThrows) {
  LstmParams p(2, 3);
  EXPECT_THROW(lstm_cell(Tensor({4}), LstmState::zeros(3), p), DimensionError);
  EXPECT_THROW(lstm_cell(Tensor({2}), LstmState::zeros(2), p), DimensionError);
}

TEST(Mse, Examples) {
  auto r = mse_loss(Tensor::vector({1, 2}), Tensor::vector({1, 2}));
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.grad, Tensor::vector({0, 0}));
  r = mse_loss(Tensor::vector({3}), Tensor::vector({1}));
  EXPECT_DOUBLE_EQ(r.loss, 4.0);
  EXPECT_DOUBLE_EQ(r.grad[0], 4.0);
  r = mse_loss(Tensor::vector({1, 2}), Tensor::vector({0, 0}));
  EXPECT_DOUBLE_EQ(r.loss, 2.5);
  EXPECT_EQ(r.grad, Tensor::vector({1, 2}));
}

TEST(Mse, EmptyOrMismatchedBatchThrows) {
  EXPECT_THROW(mse_loss(Tensor(), Tensor()), DimensionError);
  EXPECT_THROW(mse_loss(Tensor::vector({1}), Tensor::vector({1, 2})), DimensionError);
  EXPECT_THROW(Tensor({0}), DimensionError);
}

TEST(Adam, ZeroGradientLeavesParam) {
  Tensor p = Tensor::vector({0.3, -1.0});
  AdamState s(p.shape(), {});
  for (int i = 0; i < 5; ++i) adam_step(p, Tensor({2}), s);
  EXPECT_EQ(p, Tensor::vector({0.3, -1.0}));
  EXPECT_EQ(s.step_count(), 5u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Tensor p = Tensor::vector({0.0});
  AdamState s(p.shape(), {0.001, 0.9, 0.999, 1e-8});
  EXPECT_EQ(s.first_moment(), Tensor({1}));
  adam_step(p, Tensor::vector({0.5}), s);
  // m_hat = 0.5, v_hat = 0.25: update = lr * 0.5 / (0.5 + 1e-8).
  EXPECT_NEAR(p[0], -0.001 * 0.5 / (0.5 + 1e-8), 1e-18);
  EXPECT_NEAR(p[0], -0.001 * (1.0 - 2e-8), 1e-15);
}

TEST(Adam, TwoStepsSameSignMoveTwiceLr) {
  Tensor p = Tensor::vector({1.0});
  AdamState s(p.shape(), {});
  adam_step(p, Tensor::vector({-0.2}), s);
  adam_step(p, Tensor::vector({-0.2}), s);
  EXPECT_NEAR(p[0] - 1.0, 0.002, 1e-9);
}

TEST(Adam, InvalidConfigAndShapes) {
  EXPECT_THROW(AdamState({1}, {0.0, 0.9, 0.999, 1e-8}), ConfigError);
  EXPECT_THROW(AdamState({1}, {0.001, 1.0, 0.999, 1e-8}), ConfigError);
  EXPECT_THROW(AdamState({1}, {0.001, 0.9, 0.999, 0.0}), ConfigError);
  Tensor p({2});
  AdamState s(p.shape(), {});
  EXPECT_THROW(adam_step(p, Tensor({3}), s), DimensionError);
}

TEST(GradCheck, DenseNearExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    DenseParams p(5, 3);
    p.weights = random_tensor(p.weights.shape(), rng);
    p.bias = random_tensor(p.bias.shape(), rng);
    Tensor x = random_tensor({5}, rng);
    const Tensor r = random_tensor({3}, rng);
    GradCheckProblem prob{{&p.weights, &p.bias, &x},
                          [&] { return probe(dense(x, p), r); },
                          [&] {
                            auto g = dense_backward(x, r, p);
                            return std::vector<Tensor>{g.weights, g.bias, g.input};
                          }};
    EXPECT_LT(grad_check(prob), 1e-7) << "seed " << seed;
  }
}

TEST(GradCheck, ConvReluPoolComposite) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(100 + seed);
    Conv2dParams c(2, 3, 3, 3);
    c.weights = random_tensor(c.weights.shape(), rng);
    c.bias = random_tensor(c.bias.shape(), rng);
    DenseParams d(3 * 2 * 2, 2);
    d.weights = random_tensor(d.weights.shape(), rng);
    d.bias = random_tensor(d.bias.shape(), rng);
    Tensor x = random_tensor({2, 4, 4}, rng);
    const Tensor r = random_tensor({2}, rng);
    auto forward = [&](Tensor* padded, Tensor* conv, Tensor* pooled) {
      Tensor pd = zero_pad(x, 1);
      Tensor cv = conv2d(pd, c);
      Tensor pl = avg_pool(cv, {2, 2}).reshaped({12});
      if (padded) *padded = pd;
      if (conv) *conv = cv;
      if (pooled) *pooled = pl;
      return dense(pl, d);
    };
    GradCheckProblem prob{{&c.weights, &c.bias, &d.weights, &d.bias, &x},
                          [&] { return probe(forward(nullptr, nullptr, nullptr), r); },
                          [&] {
                            Tensor pd, cv, pl;
                            forward(&pd, &cv, &pl);
                            auto gd = dense_backward(pl, r, d);
                            auto gp = avg_pool_backward(gd.input.reshaped({3, 2, 2}), {2, 2});
                            auto gc = conv2d_backward(pd, gp, c);
                            return std::vector<Tensor>{gc.weights, gc.bias, gd.weights, gd.bias,
                                                       zero_pad_backward(gc.input, 1)};
                          }};
    EXPECT_LT(grad_check(prob), 1e-5) << "seed " << seed;
  }
}

TEST(GradCheck, ReluAwayFromKink) {
  Rng rng(7);
  Tensor x = random_tensor({10}, rng);
  for (auto& v : x.values()) v += v > 0 ? 0.1 : -0.1;
  const Tensor r = random_tensor({10}, rng);
  GradCheckProblem prob{{&x},
                        [&] { return probe(relu(x), r); },
                        [&] { return std::vector<Tensor>{relu_backward(x, r)}; }};
  EXPECT_LT(grad_check(prob), 1e-7);
  EXPECT_EQ(relu_backward(Tensor::vector({0.0}), Tensor::vector({1.0}))[0], 0.0);
}

TEST(GradCheck, LstmOverFourSteps) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(300 + seed);
    LstmParams p(3, 4);
    p.w_input = random_tensor(p.w_input.shape(), rng);
    p.w_hidden = random_tensor(p.w_hidden.shape(), rng);
    p.bias = random_tensor(p.bias.shape(), rng);
    std::vector<Tensor> xs;
    for (int t = 0; t < 4; ++t) xs.push_back(random_tensor({3}, rng));
    const Tensor r = random_tensor({4}, rng);
    std::vector<Tensor*> vars{&p.w_input, &p.w_hidden, &p.bias};
    for (auto& x : xs) vars.push_back(&x);
    GradCheckProblem prob{vars,
                          [&] { return probe(lstm_sequence(xs, p).back().next.h, r); },
                          [&] {
                            LstmParams g = zeros_like(p);
                            auto gx = lstm_sequence_backward(lstm_sequence(xs, p), r, p, g);
                            std::vector<Tensor> out{g.w_input, g.w_hidden, g.bias};
                            out.insert(out.end(), gx.begin(), gx.end());
                            return out;
                          }};
    EXPECT_LT(grad_check(prob), 1e-4) << "seed " << seed;
  }
}

TEST(GradCheck, NanReportsFailure) {
  Tensor x = Tensor::vector({1.0});
  GradCheckProblem prob{{&x},
                        [&] { return x[0]; },
                        [&] { return std::vector<Tensor>{Tensor::vector({std::nan("")})}; }};
  EXPECT_TRUE(std::isinf(grad_check(prob)));
}

TEST(Tensor, ShapeInvariants) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_TRUE(t.all_finite());
  EXPECT_THROW(t.reshaped({4}), DimensionError);
}
