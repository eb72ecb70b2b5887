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
#include <span>
#include <string>
#include <vector>

#include "slsim/nn/layers.hpp"
#include "slsim/tensor.hpp"

namespace slsim::splitsim {

/// Which inputs the server-side predictor sees.
enum class Modality { rf, img, img_rf };

std::string to_string(Modality m);
Modality parse_modality(const std::string& text);

struct ModelShape {
  Modality modality = Modality::img_rf;
  std::size_t img_h = 40;
  std::size_t img_w = 40;
  nn::PoolWindow pool{40, 40};
  std::size_t conv_channels = 8;
  std::size_t kernel = 3;  // odd; the device pads to keep the frame size
  std::size_t hidden = 32;

  bool uses_images() const { return modality != Modality::rf; }
  bool uses_power() const { return modality != Modality::img; }
  /// Scalars per frame at the cut layer; zero for the RF-only model.
  std::size_t cut_width() const;
  std::size_t lstm_input() const { return cut_width() + (uses_power() ? 1 : 0); }

  void validate() const;
};

/// Device half: conv k x k (same size) -> ReLU -> conv 1x1 to one channel ->
/// average pool. Output is the flattened pooled map.
struct DeviceCnn {
  nn::Conv2dParams conv1;
  nn::Conv2dParams conv2;
  nn::PoolWindow pool;
  std::size_t pad = 0;

  struct Cache {
    Tensor padded;    // [1, H+2p, W+2p]
    Tensor hidden;    // conv1 output before ReLU
    Tensor activated;
    Tensor mixed;     // conv2 output [1, H, W]
  };

  Tensor forward(const Tensor& frame, Cache* cache = nullptr) const;
  /// Accumulates weight gradients; the raw frame needs no gradient.
  void backward(const Cache& cache, const Tensor& grad_features, nn::Conv2dParams& grad_conv1,
                nn::Conv2dParams& grad_conv2) const;
};

/// Server half: single-layer LSTM over the window followed by a dense head
/// on the last hidden state.
struct ServerRnn {
  nn::LstmParams lstm;
  nn::DenseParams head;
};

struct ModelGrads {
  nn::Conv2dParams conv1, conv2;
  nn::LstmParams lstm;
  nn::DenseParams head;

  std::vector<Tensor*> tensors();
};

/// Server-side view of one window: per-frame cut features (possibly empty)
/// and standardised powers, plus the standardised target.
struct WindowInputs {
  std::vector<Tensor> features;
  std::vector<double> powers;
  double target = 0.0;
};

struct ServerPass {
  double loss = 0.0;
  std::vector<double> predictions;
  /// Gradient w.r.t. each window's cut features, [window][frame]; empty for RF.
  std::vector<std::vector<Tensor>> feature_grads;
};

class SplitModel {
 public:
  SplitModel(ModelShape shape, std::uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  const DeviceCnn& device() const { return device_; }
  DeviceCnn& device() { return device_; }
  const ServerRnn& server() const { return server_; }
  ServerRnn& server() { return server_; }

  /// Parameters in a fixed order matching ModelGrads::tensors().
  std::vector<Tensor*> parameters();
  ModelGrads zero_grads() const;

  Tensor device_forward(const Tensor& frame, DeviceCnn::Cache* cache = nullptr) const;

  /// Prediction for one window (standardised units).
  double predict(const std::vector<Tensor>& features, std::span<const double> powers) const;

  /// MSE over the windows; with `grads` set, accumulates server gradients and
  /// fills the cut-feature gradients.
  ServerPass server_pass(const std::vector<WindowInputs>& batch, ModelGrads* grads) const;

 private:
  std::vector<Tensor> lstm_inputs(const std::vector<Tensor>& features,
                                  std::span<const double> powers) const;

  ModelShape shape_;
  DeviceCnn device_;
  ServerRnn server_;
};

}  // namespace slsim::splitsim
