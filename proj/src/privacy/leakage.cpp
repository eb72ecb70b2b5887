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

#include "slsim/privacy/leakage.hpp"

#include <algorithm>
#include <cmath>

#include "slsim/error.hpp"

namespace slsim::privacy {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw DimensionError("pearson: length mismatch");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  // Relative floor: distances that differ only by rounding count as constant.
  const double tiny = 1e-24;
  if (saa <= tiny * std::max(1.0, ma * ma * n) || sbb <= tiny * std::max(1.0, mb * mb * n)) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

LeakageReport leakage_score(const DistanceMatrix& raw_d, const std::vector<Tensor>& features,
                            std::size_t dim) {
  if (features.size() < 3 || raw_d.size() != features.size())
    throw DimensionError("leakage: need parallel sample sets of at least three");
  const std::size_t n = features.size();
  const auto feat_d = pairwise_distances(features);
  const auto raw_e = classical_mds(raw_d, dim);
  const auto feat_e = classical_mds(feat_d, dim);
  const auto raw_ed = coordinate_distances(raw_e.coords, n, dim);
  const auto feat_ed = coordinate_distances(feat_e.coords, n, dim);

  LeakageReport r;
  r.samples = n;
  r.leakage = std::max(0.0, pearson(raw_ed.upper_triangle(), feat_ed.upper_triangle()));
  r.stress_raw = kruskal_stress(raw_d, raw_ed);
  r.stress_feat = kruskal_stress(feat_d, feat_ed);
  return r;
}

LeakageReport leakage_score(const std::vector<Tensor>& raw, const std::vector<Tensor>& features,
                            std::size_t dim) {
  if (raw.size() != features.size() || raw.size() < 3)
    throw DimensionError("leakage: need parallel sample sets of at least three");
  return leakage_score(pairwise_distances(raw), features, dim);
}

}  // namespace slsim::privacy
