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

#include "slsim/nn/adam.hpp"

#include <cmath>

#include "slsim/error.hpp"

namespace slsim::nn {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("adam: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam: beta1 must lie in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam: beta2 must lie in [0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be positive");
}

AdamState::AdamState(const Shape& param_shape, AdamConfig config)
    : config_(config), m_(param_shape), v_(param_shape) {
  config_.validate();
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state) {
  require_same_shape(param, grad, "adam_step");
  require_same_shape(param, state.m_, "adam_step state");
  const auto& cfg = state.config_;
  ++state.step_count_;
  const double t = static_cast<double>(state.step_count_);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  auto p = param.data();
  auto g = grad.data();
  auto m = state.m_.data();
  auto v = state.v_.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    p[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace slsim::nn
