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

#pragma once

#include <cstddef>
#include <vector>

#include "slsim/tensor.hpp"

namespace slsim::privacy {

/// Symmetric n x n matrix of non-negative distances with a zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  /// Throws unless the entries form a valid distance matrix (symmetry to 1e-12).
  DistanceMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  const std::vector<double>& entries() const { return d_; }

  /// Entries strictly above the diagonal, row by row.
  std::vector<double> upper_triangle() const;

 private:
  std::size_t n_;
  std::vector<double> d_;
};

/// Euclidean distances between flattened samples of equal shape.
DistanceMatrix pairwise_distances(const std::vector<Tensor>& samples);

/// Distances between the rows of an n x dim coordinate matrix (row-major).
DistanceMatrix coordinate_distances(const std::vector<double>& coords, std::size_t n, std::size_t dim);

struct MdsResult {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> coords;       // n x dim, row-major
  std::vector<double> eigenvalues;  // all n eigenvalues of the centred Gram matrix, descending
};

/// Classical (Torgerson) scaling: double-centre the squared distances,
/// keep the top `dim` eigenpairs, scale eigenvectors by sqrt(max(lambda,0)).
/// Each axis is oriented so its last non-negligible coordinate is positive.
MdsResult classical_mds(const DistanceMatrix& d, std::size_t dim);

/// -1/2 J (D o D) J with J = I - 11^T / n, row-major.
std::vector<double> double_centered_gram(const DistanceMatrix& d);

/// Kruskal stress-1 of an embedding against the distances it approximates.
double kruskal_stress(const DistanceMatrix& original, const DistanceMatrix& embedded);

}  // namespace slsim::privacy
