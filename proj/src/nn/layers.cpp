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

#include "slsim/nn/layers.hpp"

#include <cmath>
#include <string>

#include "slsim/error.hpp"

namespace slsim::nn {
namespace {

struct Spatial {
  std::size_t channels, height, width;
};

Spatial spatial_of(const Tensor& t, const char* what) {
  if (t.rank() == 2) return {1, t.dim(0), t.dim(1)};
  if (t.rank() == 3) return {t.dim(0), t.dim(1), t.dim(2)};
  throw DimensionError(std::string(what) + ": expected [H,W] or [C,H,W], got " +
                       to_string(t.shape()));
}

Shape with_spatial(const Tensor& like, std::size_t h, std::size_t w) {
  if (like.rank() == 2) return {h, w};
  return {like.dim(0), h, w};
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor avg_pool(const Tensor& input, PoolWindow window) {
  const auto [channels, height, width] = spatial_of(input, "avg_pool");
  if (window.h == 0 || window.w == 0 || height % window.h != 0 || width % window.w != 0) {
    throw DimensionError("avg_pool: window " + std::to_string(window.h) + "x" +
                         std::to_string(window.w) + " does not tile input " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  const std::size_t out_h = height / window.h;
  const std::size_t out_w = width / window.w;
  Tensor out(with_spatial(input, out_h, out_w));
  const double scale = 1.0 / static_cast<double>(window.h * window.w);
  const auto in = input.data();
  auto dst = out.data();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      const double* row = &in[(c * height + y) * width];
      double* out_row = &dst[(c * out_h + y / window.h) * out_w];
      for (std::size_t x = 0; x < width; ++x) out_row[x / window.w] += row[x];
    }
  }
  out *= scale;
  return out;
}

Tensor avg_pool_backward(const Tensor& grad_output, PoolWindow window) {
  const auto [channels, out_h, out_w] = spatial_of(grad_output, "avg_pool_backward");
  const std::size_t height = out_h * window.h;
  const std::size_t width = out_w * window.w;
  Tensor grad(with_spatial(grad_output, height, width));
  const double scale = 1.0 / static_cast<double>(window.h * window.w);
  const auto g = grad_output.data();
  auto dst = grad.data();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      const double* g_row = &g[(c * out_h + y / window.h) * out_w];
      double* row = &dst[(c * height + y) * width];
      for (std::size_t x = 0; x < width; ++x) row[x] = g_row[x / window.w] * scale;
    }
  }
  return grad;
}

Tensor zero_pad(const Tensor& input, std::size_t pad) {
  const auto [channels, height, width] = spatial_of(input, "zero_pad");
  const std::size_t ph = height + 2 * pad;
  const std::size_t pw = width + 2 * pad;
  Tensor out(with_spatial(input, ph, pw));
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t y = 0; y < height; ++y)
      for (std::size_t x = 0; x < width; ++x)
        out[(c * ph + y + pad) * pw + x + pad] = input[(c * height + y) * width + x];
  return out;
}

Tensor zero_pad_backward(const Tensor& grad_output, std::size_t pad) {
  const auto [channels, ph, pw] = spatial_of(grad_output, "zero_pad_backward");
  if (ph <= 2 * pad || pw <= 2 * pad) throw DimensionError("zero_pad_backward: padding exceeds extent");
  const std::size_t height = ph - 2 * pad;
  const std::size_t width = pw - 2 * pad;
  Tensor out(with_spatial(grad_output, height, width));
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t y = 0; y < height; ++y)
      for (std::size_t x = 0; x < width; ++x)
        out[(c * height + y) * width + x] = grad_output[(c * ph + y + pad) * pw + x + pad];
  return out;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
  require_same_shape(input, grad_output, "relu_backward");
  Tensor grad = grad_output;
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!(input[i] > 0.0)) grad[i] = 0.0;
  return grad;
}

void init_fan_in(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t.values()) v = rng.uniform(-bound, bound);
}

Conv2dParams::Conv2dParams(std::size_t in_channels, std::size_t out_channels,
                           std::size_t kernel_h, std::size_t kernel_w, std::size_t stride_)
    : weights({out_channels, in_channels, kernel_h, kernel_w}),
      bias({out_channels}),
      stride(stride_) {
  if (stride == 0) throw DimensionError("conv2d: stride must be at least 1");
}

namespace {

struct ConvGeometry {
  std::size_t c_in, h, w, c_out, kh, kw, stride, out_h, out_w;
};

ConvGeometry conv_geometry(const Tensor& input, const Conv2dParams& p) {
  if (input.rank() != 3) throw DimensionError("conv2d: input must be [C,H,W], got " + to_string(input.shape()));
  if (p.weights.rank() != 4 || p.bias.rank() != 1 || p.bias.dim(0) != p.weights.dim(0))
    throw DimensionError("conv2d: malformed parameters");
  if (p.stride == 0) throw DimensionError("conv2d: stride must be at least 1");
  ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), p.out_channels(),
                 p.kernel_h(), p.kernel_w(), p.stride, 0, 0};
  if (g.c_in != p.in_channels())
    throw DimensionError("conv2d: input has " + std::to_string(g.c_in) + " channels, kernel expects " +
                         std::to_string(p.in_channels()));
  if (g.kh > g.h || g.kw > g.w)
    throw DimensionError("conv2d: kernel " + std::to_string(g.kh) + "x" + std::to_string(g.kw) +
                         " larger than input " + std::to_string(g.h) + "x" + std::to_string(g.w));
  g.out_h = (g.h - g.kh) / g.stride + 1;
  g.out_w = (g.w - g.kw) / g.stride + 1;
  return g;
}

}  // namespace

Tensor conv2d(const Tensor& input, const Conv2dParams& params) {
  const auto g = conv_geometry(input, params);
  Tensor out({g.c_out, g.out_h, g.out_w});
  const double* in = input.data().data();
  const double* wt = params.weights.data().data();
  double* dst = out.data().data();
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t o = 0; o < g.c_out; ++o) {
    double* out_plane = dst + o * plane;
    for (std::size_t i = 0; i < plane; ++i) out_plane[i] = params.bias[o];
    for (std::size_t c = 0; c < g.c_in; ++c) {
      const double* in_plane = in + c * g.h * g.w;
      for (std::size_t ky = 0; ky < g.kh; ++ky) {
        for (std::size_t kx = 0; kx < g.kw; ++kx) {
          const double wv = wt[((o * g.c_in + c) * g.kh + ky) * g.kw + kx];
          for (std::size_t y = 0; y < g.out_h; ++y) {
            const double* in_row = in_plane + (y * g.stride + ky) * g.w + kx;
            double* out_row = out_plane + y * g.out_w;
            if (g.stride == 1) {
#pragma omp simd
              for (std::size_t x = 0; x < g.out_w; ++x) out_row[x] += wv * in_row[x];
            } else {
              for (std::size_t x = 0; x < g.out_w; ++x) out_row[x] += wv * in_row[x * g.stride];
            }
          }
        }
      }
    }
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& grad_output,
                            const Conv2dParams& params, bool want_input_grad) {
  const auto g = conv_geometry(input, params);
  if (grad_output.shape() != Shape{g.c_out, g.out_h, g.out_w})
    throw DimensionError("conv2d_backward: upstream gradient shape " + to_string(grad_output.shape()));
  Conv2dGrads grads{Tensor(), Tensor(params.weights.shape()), Tensor(params.bias.shape())};
  if (want_input_grad) grads.input = Tensor(input.shape());
  const double* in = input.data().data();
  const double* go = grad_output.data().data();
  const double* wt = params.weights.data().data();
  double* dw = grads.weights.data().data();
  double* din = want_input_grad ? grads.input.data().data() : nullptr;
  const std::size_t plane = g.out_h * g.out_w;
  for (std::size_t o = 0; o < g.c_out; ++o) {
    const double* g_plane = go + o * plane;
    double bias_acc = 0.0;
#pragma omp simd reduction(+ : bias_acc)
    for (std::size_t i = 0; i < plane; ++i) bias_acc += g_plane[i];
    grads.bias[o] = bias_acc;
    for (std::size_t c = 0; c < g.c_in; ++c) {
      const double* in_plane = in + c * g.h * g.w;
      for (std::size_t ky = 0; ky < g.kh; ++ky) {
        for (std::size_t kx = 0; kx < g.kw; ++kx) {
          const std::size_t widx = ((o * g.c_in + c) * g.kh + ky) * g.kw + kx;
          double acc = 0.0;
          for (std::size_t y = 0; y < g.out_h; ++y) {
            const double* in_row = in_plane + (y * g.stride + ky) * g.w + kx;
            const double* g_row = g_plane + y * g.out_w;
            if (g.stride == 1) {
#pragma omp simd reduction(+ : acc)
              for (std::size_t x = 0; x < g.out_w; ++x) acc += g_row[x] * in_row[x];
            } else {
              for (std::size_t x = 0; x < g.out_w; ++x) acc += g_row[x] * in_row[x * g.stride];
            }
          }
          dw[widx] = acc;
          if (!din) continue;
          const double wv = wt[widx];
          double* din_plane = din + c * g.h * g.w;
          for (std::size_t y = 0; y < g.out_h; ++y) {
            double* din_row = din_plane + (y * g.stride + ky) * g.w + kx;
            const double* g_row = g_plane + y * g.out_w;
            if (g.stride == 1) {
#pragma omp simd
              for (std::size_t x = 0; x < g.out_w; ++x) din_row[x] += wv * g_row[x];
            } else {
              for (std::size_t x = 0; x < g.out_w; ++x) din_row[x * g.stride] += wv * g_row[x];
            }
          }
        }
      }
    }
  }
  return grads;
}

DenseParams::DenseParams(std::size_t in_features, std::size_t out_features)
    : weights({out_features, in_features}), bias({out_features}) {}

namespace {

void check_dense(const Tensor& input, const DenseParams& p) {
  if (p.weights.rank() != 2 || p.bias.rank() != 1 || p.bias.dim(0) != p.weights.dim(0))
    throw DimensionError("dense: malformed parameters");
  if (input.rank() != 1 || input.dim(0) != p.weights.dim(1))
    throw DimensionError("dense: input " + to_string(input.shape()) + " vs weights " +
                         to_string(p.weights.shape()));
}

// out += W x for W [rows, cols]
void matvec_acc(const Tensor& w, std::span<const double> x, std::span<double> out) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  const double* wp = w.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = wp + r * cols;
#pragma omp simd reduction(+ : acc)
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    out[r] += acc;
  }
}

// out += W^T g
void matvec_t_acc(const Tensor& w, std::span<const double> g, std::span<double> out) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  const double* wp = w.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    const double* row = wp + r * cols;
#pragma omp simd
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * gr;
  }
}

// dW += g x^T
void outer_acc(std::span<const double> g, std::span<const double> x, Tensor& dw) {
  const std::size_t rows = dw.dim(0), cols = dw.dim(1);
  double* dp = dw.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    double* row = dp + r * cols;
#pragma omp simd
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

}  // namespace

Tensor dense(const Tensor& input, const DenseParams& params) {
  check_dense(input, params);
  Tensor out = params.bias;
  matvec_acc(params.weights, input.data(), out.data());
  return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& grad_output,
                          const DenseParams& params) {
  check_dense(input, params);
  if (grad_output.shape() != params.bias.shape())
    throw DimensionError("dense_backward: upstream gradient shape " + to_string(grad_output.shape()));
  DenseGrads grads{Tensor(input.shape()), Tensor(params.weights.shape()), grad_output};
  matvec_t_acc(params.weights, grad_output.data(), grads.input.data());
  outer_acc(grad_output.data(), input.data(), grads.weights);
  return grads;
}

LstmParams::LstmParams(std::size_t input_size, std::size_t hidden_size)
    : w_input({4 * hidden_size, input_size}),
      w_hidden({4 * hidden_size, hidden_size}),
      bias({4 * hidden_size}) {}

LstmState LstmState::zeros(std::size_t hidden_size) {
  return {Tensor({hidden_size}), Tensor({hidden_size})};
}

namespace {

void check_lstm(const Tensor& input, const LstmState& state, const LstmParams& p) {
  if (p.w_input.rank() != 2 || p.w_hidden.rank() != 2 || p.bias.rank() != 1)
    throw DimensionError("lstm: malformed parameters");
  const std::size_t m = p.w_hidden.dim(1);
  if (p.w_hidden.dim(0) != 4 * m || p.w_input.dim(0) != 4 * m || p.bias.dim(0) != 4 * m)
    throw DimensionError("lstm: gate blocks must have 4*hidden rows");
  if (input.rank() != 1 || input.dim(0) != p.w_input.dim(1))
    throw DimensionError("lstm: input " + to_string(input.shape()) + " vs input weights " +
                         to_string(p.w_input.shape()));
  if (state.h.shape() != Shape{m} || state.c.shape() != Shape{m})
    throw DimensionError("lstm: state must have hidden width " + std::to_string(m));
}

}  // namespace

LstmCellCache lstm_cell(const Tensor& input, const LstmState& state, const LstmParams& params) {
  check_lstm(input, state, params);
  const std::size_t m = params.hidden_size();
  Tensor pre = params.bias;
  matvec_acc(params.w_input, input.data(), pre.data());
  matvec_acc(params.w_hidden, state.h.data(), pre.data());

  LstmCellCache cache{input, state, Tensor({m}), Tensor({m}), Tensor({m}), Tensor({m}),
                      Tensor({m}), LstmState::zeros(m)};
  for (std::size_t j = 0; j < m; ++j) {
    const double i = sigmoid(pre[j]);
    const double f = sigmoid(pre[m + j]);
    const double g = std::tanh(pre[2 * m + j]);
    const double o = sigmoid(pre[3 * m + j]);
    const double c = f * state.c[j] + i * g;
    const double tc = std::tanh(c);
    cache.gate_i[j] = i;
    cache.gate_f[j] = f;
    cache.gate_g[j] = g;
    cache.gate_o[j] = o;
    cache.tanh_c[j] = tc;
    cache.next.c[j] = c;
    cache.next.h[j] = o * tc;
  }
  return cache;
}

LstmCellGrads lstm_cell_backward(const LstmCellCache& cache, const Tensor& grad_h,
                                 const Tensor& grad_c, const LstmParams& params,
                                 LstmParams& param_grads) {
  const std::size_t m = params.hidden_size();
  if (grad_h.shape() != Shape{m} || grad_c.shape() != Shape{m})
    throw DimensionError("lstm_cell_backward: upstream gradients must have hidden width");
  Tensor d_pre({4 * m});
  LstmCellGrads out{Tensor(cache.input.shape()), LstmState::zeros(m)};
  for (std::size_t j = 0; j < m; ++j) {
    const double i = cache.gate_i[j], f = cache.gate_f[j], g = cache.gate_g[j], o = cache.gate_o[j];
    const double tc = cache.tanh_c[j];
    const double dc = grad_c[j] + grad_h[j] * o * (1.0 - tc * tc);
    const double d_o = grad_h[j] * tc;
    const double d_i = dc * g;
    const double d_f = dc * cache.prev.c[j];
    const double d_g = dc * i;
    out.prev.c[j] = dc * f;
    d_pre[j] = d_i * i * (1.0 - i);
    d_pre[m + j] = d_f * f * (1.0 - f);
    d_pre[2 * m + j] = d_g * (1.0 - g * g);
    d_pre[3 * m + j] = d_o * o * (1.0 - o);
  }
  outer_acc(d_pre.data(), cache.input.data(), param_grads.w_input);
  outer_acc(d_pre.data(), cache.prev.h.data(), param_grads.w_hidden);
  param_grads.bias += d_pre;
  matvec_t_acc(params.w_input, d_pre.data(), out.input.data());
  matvec_t_acc(params.w_hidden, d_pre.data(), out.prev.h.data());
  return out;
}

std::vector<LstmCellCache> lstm_sequence(const std::vector<Tensor>& inputs,
                                         const LstmParams& params) {
  std::vector<LstmCellCache> caches;
  caches.reserve(inputs.size());
  LstmState state = LstmState::zeros(params.hidden_size());
  for (const auto& x : inputs) {
    caches.push_back(lstm_cell(x, state, params));
    state = caches.back().next;
  }
  return caches;
}

std::vector<Tensor> lstm_sequence_backward(const std::vector<LstmCellCache>& caches,
                                           const Tensor& grad_last_h, const LstmParams& params,
                                           LstmParams& param_grads) {
  const std::size_t m = params.hidden_size();
  std::vector<Tensor> grad_inputs(caches.size());
  Tensor dh = grad_last_h;
  Tensor dc({m});
  for (std::size_t t = caches.size(); t-- > 0;) {
    auto step = lstm_cell_backward(caches[t], dh, dc, params, param_grads);
    grad_inputs[t] = std::move(step.input);
    dh = std::move(step.prev.h);
    dc = std::move(step.prev.c);
  }
  return grad_inputs;
}

LstmParams zeros_like(const LstmParams& p) {
  LstmParams z;
  z.w_input = Tensor(p.w_input.shape());
  z.w_hidden = Tensor(p.w_hidden.shape());
  z.bias = Tensor(p.bias.shape());
  return z;
}

DenseParams zeros_like(const DenseParams& p) {
  DenseParams z;
  z.weights = Tensor(p.weights.shape());
  z.bias = Tensor(p.bias.shape());
  return z;
}

Conv2dParams zeros_like(const Conv2dParams& p) {
  Conv2dParams z;
  z.weights = Tensor(p.weights.shape());
  z.bias = Tensor(p.bias.shape());
  z.stride = p.stride;
  return z;
}

MseResult mse_loss(const Tensor& prediction, const Tensor& target) {
  require_same_shape(prediction, target, "mse_loss");
  if (prediction.rank() != 1) throw DimensionError("mse_loss: expected a batch vector");
  const double batch = static_cast<double>(prediction.size());
  MseResult r{0.0, Tensor(prediction.shape())};
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double diff = prediction[i] - target[i];
    r.loss += diff * diff;
    r.grad[i] = 2.0 * diff / batch;
  }
  r.loss /= batch;
  return r;
}

}  // namespace slsim::nn
