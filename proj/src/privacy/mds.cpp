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

#include "slsim/privacy/mds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "slsim/error.hpp"

namespace slsim::privacy {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), d_(std::move(entries)) {
  if (d_.size() != n * n) throw DimensionError("distance matrix: expected n*n entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (d_[i * n + i] != 0.0) throw ConfigError("distance matrix: non-zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      const double a = d_[i * n + j], b = d_[j * n + i];
      if (!(a >= 0.0)) throw ConfigError("distance matrix: negative or NaN entry");
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw ConfigError("distance matrix: not symmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
    }
  }
}

std::vector<double> DistanceMatrix::upper_triangle() const {
  std::vector<double> out;
  out.reserve(n_ * (n_ - 1) / 2);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) out.push_back(d_[i * n_ + j]);
  return out;
}

DistanceMatrix pairwise_distances(const std::vector<Tensor>& samples) {
  if (samples.size() < 2) throw DimensionError("pairwise_distances: need at least two samples");
  const std::size_t n = samples.size();
  for (const auto& s : samples)
    if (s.shape() != samples.front().shape())
      throw DimensionError("pairwise_distances: sample shape " + to_string(s.shape()) + " vs " +
                           to_string(samples.front().shape()));
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = samples[i].data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = samples[j].data();
      double acc = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) acc += (a[t] - b[t]) * (a[t] - b[t]);
      d.set(i, j, std::sqrt(acc));
    }
  }
  return d;
}

DistanceMatrix coordinate_distances(const std::vector<double>& coords, std::size_t n, std::size_t dim) {
  if (coords.size() != n * dim) throw DimensionError("coordinate_distances: size mismatch");
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double diff = coords[i * dim + t] - coords[j * dim + t];
        acc += diff * diff;
      }
      d.set(i, j, std::sqrt(acc));
    }
  return d;
}

std::vector<double> double_centered_gram(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<double> sq(n * n);
  for (std::size_t i = 0; i < n * n; ++i) sq[i] = d.entries()[i] * d.entries()[i];
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq[i * n + j];
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  // Squared distances are symmetric, so column means equal row means.
  std::vector<double> b(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
  return b;
}

MdsResult classical_mds(const DistanceMatrix& d, std::size_t dim) {
  const std::size_t n = d.size();
  if (dim < 1 || dim >= n)
    throw DimensionError("classical_mds: need n > dim >= 1, got n=" + std::to_string(n) +
                         ", dim=" + std::to_string(dim));
  const auto gram = double_centered_gram(d);
  Eigen::MatrixXd b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gram[i * n + j];

  // Tridiagonalisation + implicit QL: deterministic, ascending eigenvalues.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw std::runtime_error("classical_mds: eigensolver failed");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  MdsResult r{n, dim, std::vector<double>(n * dim, 0.0), {}};
  for (std::size_t i = 0; i < n; ++i) r.eigenvalues.push_back(values(static_cast<Eigen::Index>(n - 1 - i)));

  double scale_ref = 0.0;
  for (double v : r.eigenvalues) scale_ref = std::max(scale_ref, std::abs(v));
  for (std::size_t a = 0; a < dim; ++a) {
    const auto col = static_cast<Eigen::Index>(n - 1 - a);
    const double lambda = values(col);
    const double s = std::sqrt(std::max(lambda, 0.0));
    if (s == 0.0 || lambda <= 1e-12 * scale_ref) continue;
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) largest = std::max(largest, std::abs(vectors(static_cast<Eigen::Index>(i), col)));
    double sign = 1.0;
    for (std::size_t i = n; i-- > 0;) {
      const double v = vectors(static_cast<Eigen::Index>(i), col);
      if (std::abs(v) > 1e-9 * largest) {
        sign = v > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      r.coords[i * dim + a] = sign * s * vectors(static_cast<Eigen::Index>(i), col);
  }
  return r;
}

double kruskal_stress(const DistanceMatrix& original, const DistanceMatrix& embedded) {
  if (original.size() != embedded.size()) throw DimensionError("stress: size mismatch");
  double num = 0.0, den = 0.0;
  const auto& a = original.entries();
  const auto& b = embedded.entries();
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace slsim::privacy
