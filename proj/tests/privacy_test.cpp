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

#include "slsim/error.hpp"
#include "slsim/privacy/leakage.hpp"
#include "slsim/privacy/mds.hpp"
#include "slsim/rng.hpp"

using namespace slsim;
using namespace slsim::privacy;

namespace {

std::vector<Tensor> random_points(std::size_t n, std::size_t dim, Rng& rng, double spread = 1.0) {
  std::vector<Tensor> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor t({dim});
    for (auto& v : t.values()) v = rng.uniform(-spread, spread);
    pts.push_back(std::move(t));
  }
  return pts;
}

}  // namespace

TEST(Distances, Examples) {
  const auto same = pairwise_distances({Tensor::vector({1, 2}), Tensor::vector({1, 2})});
  EXPECT_EQ(same.entries(), (std::vector<double>{0, 0, 0, 0}));
  const auto d = pairwise_distances({Tensor::vector({0}), Tensor::vector({3})});
  EXPECT_EQ(d(0, 1), 3.0);
  EXPECT_EQ(d(1, 0), 3.0);
}

TEST(Distances, MatchGramOracle) {
  Rng rng(4);
  const auto pts = random_points(5, 4, rng);
  const auto d = pairwise_distances(pts);
  auto dot = [](const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      const double sq = dot(pts[i], pts[i]) + dot(pts[j], pts[j]) - 2.0 * dot(pts[i], pts[j]);
      EXPECT_NEAR(d(i, j), std::sqrt(std::max(sq, 0.0)), 1e-12);
    }
}

TEST(Distances, Errors) {
  EXPECT_THROW(pairwise_distances({Tensor::vector({1})}), DimensionError);
  EXPECT_THROW(pairwise_distances({Tensor::vector({1}), Tensor::vector({1, 2})}), DimensionError);
  EXPECT_THROW(DistanceMatrix(2, {0, 1, 2, 0}), ConfigError);
  EXPECT_THROW(DistanceMatrix(2, {1, 1, 1, 0}), ConfigError);
}

TEST(Mds, CollinearThreePoints) {
  const DistanceMatrix d(3, {0, 1, 2, 1, 0, 1, 2, 1, 0});
  const auto r = classical_mds(d, 1);
  EXPECT_NEAR(r.coords[0], -1.0, 1e-12);
  EXPECT_NEAR(r.coords[1], 0.0, 1e-12);
  EXPECT_NEAR(r.coords[2], 1.0, 1e-12);
  // Hand eigen-solve: B = [[1,0,-1],[0,0,0],[-1,0,1]] has eigenvalues 2, 0, 0.
  EXPECT_NEAR(r.eigenvalues[0], 2.0, 1e-12);
}

TEST(Mds, AllZeroDistances) {
  const auto r = classical_mds(DistanceMatrix(4), 2);
  for (double v : r.coords) EXPECT_EQ(v, 0.0);
}

TEST(Mds, RecoversPlanarConfigurations) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 3 + rng.below(18);
    const auto pts = random_points(n, 2, rng, 5.0);
    const auto d = pairwise_distances(pts);
    const auto r = classical_mds(d, 2);
    const auto back = coordinate_distances(r.coords, n, 2);
    for (std::size_t i = 0; i < n * n; ++i) ASSERT_NEAR(back.entries()[i], d.entries()[i], 1e-9);
  }
}

TEST(Mds, Errors) {
  const DistanceMatrix d(3, {0, 1, 2, 1, 0, 1, 2, 1, 0});
  EXPECT_THROW(classical_mds(d, 3), DimensionError);
  EXPECT_THROW(classical_mds(d, 0), DimensionError);
}

TEST(Mds, TruncationErrorBoundedByDiscardedSpectrum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(1000 + seed);
    const std::size_t n = 12, dim = 2;
    const auto d = pairwise_distances(random_points(n, 5, rng));
    const auto gram = double_centered_gram(d);
    const auto r = classical_mds(d, dim);
    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double approx = 0.0;
        for (std::size_t a = 0; a < dim; ++a) approx += r.coords[i * dim + a] * r.coords[j * dim + a];
        frob += (gram[i * n + j] - approx) * (gram[i * n + j] - approx);
      }
    frob = std::sqrt(frob);
    double tail = 0.0;
    for (std::size_t k = dim; k < n; ++k) tail += r.eigenvalues[k] * r.eigenvalues[k];
    EXPECT_NEAR(frob, std::sqrt(tail), 1e-9);
    EXPECT_LE(frob, std::sqrt(static_cast<double>(n - dim)) * std::abs(r.eigenvalues[dim]) + 1e-9);
  }
}

TEST(Leakage, IdentityAndConstant) {
  Rng rng(8);
  const auto raw = random_points(30, 6, rng);
  EXPECT_NEAR(leakage_score(raw, raw).leakage, 1.0, 1e-12);
  const std::vector<Tensor> flat(30, Tensor::vector({0.5, 0.5}));
  EXPECT_EQ(leakage_score(raw, flat).leakage, 0.0);
}

TEST(Leakage, ScaleInvariantAndBounded) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(50 + seed);
    const auto raw = random_points(25, 8, rng);
    const auto feat = random_points(25, 3, rng);
    const double base = leakage_score(raw, feat).leakage;
    auto scaled = [](std::vector<Tensor> v, double s) {
      for (auto& t : v) t *= s;
      return v;
    };
    EXPECT_NEAR(leakage_score(scaled(raw, 3.7), scaled(feat, 0.02)).leakage, base, 1e-9);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
  }
}

TEST(Leakage, NeedsThreeSamples) {
  EXPECT_THROW(leakage_score({Tensor::vector({1}), Tensor::vector({2})},
                             {Tensor::vector({1}), Tensor::vector({2})}),
               DimensionError);
}
