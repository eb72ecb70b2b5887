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

#include <functional>
#include <vector>

#include "slsim/tensor.hpp"

namespace slsim::nn {

/// A differentiable fragment exposed for checking: the tensors to perturb
/// (parameters and inputs alike), a scalar loss evaluated at their current
/// values, and the analytic gradient of that loss for each tensor in order.
struct GradCheckProblem {
  std::vector<Tensor*> variables;
  std::function<double()> loss;
  std::function<std::vector<Tensor>()> analytic;
};

struct GradCheckOptions {
  double step = 1e-6;
  // Gradients smaller than this are compared absolutely rather than relatively.
  double floor = 1e-5;
};

/// Worst relative error between analytic gradients and central finite
/// differences over every entry of every variable. NaN anywhere yields +inf.
double grad_check(const GradCheckProblem& problem, GradCheckOptions options = {});

}  // namespace slsim::nn
