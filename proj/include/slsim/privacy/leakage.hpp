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

#include <vector>

#include "slsim/nn/layers.hpp"
#include "slsim/privacy/mds.hpp"
#include "slsim/tensor.hpp"

namespace slsim::privacy {

struct LeakageReport {
  nn::PoolWindow pool;
  std::size_t samples = 0;
  double leakage = 0.0;  // in [0,1]
  double stress_raw = 0.0;
  double stress_feat = 0.0;
};

/// Structure preserved by the transmitted features: both sample sets are
/// embedded with classical MDS and the Pearson correlation between the two
/// embeddings' pairwise distances is clipped at zero. Zero-variance distances
/// on either side give zero leakage.
LeakageReport leakage_score(const std::vector<Tensor>& raw, const std::vector<Tensor>& features,
                            std::size_t dim = 2);

/// Same, reusing a precomputed raw-side distance matrix.
LeakageReport leakage_score(const DistanceMatrix& raw_distances,
                            const std::vector<Tensor>& features, std::size_t dim = 2);

/// Pearson correlation; returns 0 when either side has zero variance.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace slsim::privacy
