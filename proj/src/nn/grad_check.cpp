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

#include "slsim/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slsim/error.hpp"

namespace slsim::nn {

double grad_check(const GradCheckProblem& problem, GradCheckOptions options) {
  const auto analytic = problem.analytic();
  if (analytic.size() != problem.variables.size())
    throw DimensionError("grad_check: one analytic gradient per variable required");
  double worst = 0.0;
  for (std::size_t v = 0; v < problem.variables.size(); ++v) {
    Tensor& var = *problem.variables[v];
    require_same_shape(var, analytic[v], "grad_check");
    for (std::size_t i = 0; i < var.size(); ++i) {
      const double saved = var[i];
      var[i] = saved + options.step;
      const double up = problem.loss();
      var[i] = saved - options.step;
      const double down = problem.loss();
      var[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double exact = analytic[v][i];
      if (std::isnan(numeric) || std::isnan(exact)) return std::numeric_limits<double>::infinity();
      const double denom = std::max({std::abs(numeric), std::abs(exact), options.floor});
      worst = std::max(worst, std::abs(numeric - exact) / denom);
    }
  }
  return worst;
}

}  // namespace slsim::nn
