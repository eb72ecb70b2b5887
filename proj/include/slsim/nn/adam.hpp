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

#include <cstdint>

#include "slsim/tensor.hpp"

namespace slsim::nn {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws ConfigError when a hyperparameter is out of range.
  void validate() const;
};

/// Per-parameter optimizer state. Moments are zero until the first step.
class AdamState {
 public:
  AdamState(const Shape& param_shape, AdamConfig config);

  std::uint64_t step_count() const { return step_count_; }
  const Tensor& first_moment() const { return m_; }
  const Tensor& second_moment() const { return v_; }
  const AdamConfig& config() const { return config_; }

 private:
  friend void adam_step(Tensor& param, const Tensor& grad, AdamState& state);

  AdamConfig config_;
  std::uint64_t step_count_ = 0;
  Tensor m_;
  Tensor v_;
};

/// One bias-corrected Adam update of `param` in place.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state);

}  // namespace slsim::nn
