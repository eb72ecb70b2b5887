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

#include "slsim/splitsim/model.hpp"

#include <algorithm>

#include "slsim/error.hpp"
#include "slsim/rng.hpp"

namespace slsim::splitsim {

std::string to_string(Modality m) {
  switch (m) {
    case Modality::rf: return "rf";
    case Modality::img: return "img";
    case Modality::img_rf: return "img+rf";
  }
  return "?";
}

Modality parse_modality(const std::string& text) {
  if (text == "rf" || text == "RF") return Modality::rf;
  if (text == "img" || text == "Img") return Modality::img;
  if (text == "img+rf" || text == "Img+RF") return Modality::img_rf;
  throw ConfigError("unknown modality '" + text + "' (expected rf, img or img+rf)");
}

std::size_t ModelShape::cut_width() const {
  if (!uses_images()) return 0;
  return (img_h / pool.h) * (img_w / pool.w);
}

void ModelShape::validate() const {
  if (img_h == 0 || img_w == 0) throw ConfigError("model: image extents must be positive");
  if (pool.h == 0 || pool.w == 0 || img_h % pool.h != 0 || img_w % pool.w != 0)
    throw DimensionError("model: pooling window " + std::to_string(pool.h) + "x" +
                         std::to_string(pool.w) + " does not tile " + std::to_string(img_h) + "x" +
                         std::to_string(img_w));
  if (kernel == 0 || kernel % 2 == 0 || kernel > img_h || kernel > img_w)
    throw ConfigError("model: kernel must be odd and fit the frame");
  if (conv_channels == 0 || hidden == 0) throw ConfigError("model: widths must be positive");
}

Tensor DeviceCnn::forward(const Tensor& frame, Cache* cache) const {
  Tensor padded = nn::zero_pad(frame.reshaped({1, frame.dim(0), frame.dim(1)}), pad);
  Tensor hidden = nn::conv2d(padded, conv1);
  Tensor activated = nn::relu(hidden);
  Tensor mixed = nn::conv2d(activated, conv2);
  Tensor pooled = nn::avg_pool(mixed, pool);
  if (cache) *cache = {std::move(padded), std::move(hidden), std::move(activated), std::move(mixed)};
  return pooled.reshaped({pooled.size()});
}

void DeviceCnn::backward(const Cache& cache, const Tensor& grad_features,
                         nn::Conv2dParams& grad_conv1, nn::Conv2dParams& grad_conv2) const {
  const std::size_t h = cache.mixed.dim(1) / pool.h;
  const std::size_t w = cache.mixed.dim(2) / pool.w;
  const Tensor grad_mixed = nn::avg_pool_backward(grad_features.reshaped({1, h, w}), pool);
  auto g2 = nn::conv2d_backward(cache.activated, grad_mixed, conv2, true);
  grad_conv2.weights += g2.weights;
  grad_conv2.bias += g2.bias;
  const Tensor grad_hidden = nn::relu_backward(cache.hidden, g2.input);
  auto g1 = nn::conv2d_backward(cache.padded, grad_hidden, conv1, false);
  grad_conv1.weights += g1.weights;
  grad_conv1.bias += g1.bias;
}

std::vector<Tensor*> ModelGrads::tensors() {
  return {&conv1.weights, &conv1.bias, &conv2.weights, &conv2.bias, &lstm.w_input,
          &lstm.w_hidden, &lstm.bias,  &head.weights,  &head.bias};
}

SplitModel::SplitModel(ModelShape shape, std::uint64_t seed) : shape_(shape) {
  shape_.validate();
  Rng rng(seed);
  const std::size_t c = shape_.conv_channels, k = shape_.kernel, m = shape_.hidden;
  device_.conv1 = nn::Conv2dParams(1, c, k, k);
  device_.conv2 = nn::Conv2dParams(c, 1, 1, 1);
  device_.pool = shape_.pool;
  device_.pad = (k - 1) / 2;
  nn::init_fan_in(device_.conv1.weights, k * k, rng);
  nn::init_fan_in(device_.conv1.bias, k * k, rng);
  nn::init_fan_in(device_.conv2.weights, c, rng);
  nn::init_fan_in(device_.conv2.bias, c, rng);

  const std::size_t n = shape_.lstm_input();
  server_.lstm = nn::LstmParams(n, m);
  server_.head = nn::DenseParams(m, 1);
  nn::init_fan_in(server_.lstm.w_input, n, rng);
  nn::init_fan_in(server_.lstm.w_hidden, m, rng);
  nn::init_fan_in(server_.lstm.bias, m, rng);
  nn::init_fan_in(server_.head.weights, m, rng);
  nn::init_fan_in(server_.head.bias, m, rng);
}

std::vector<Tensor*> SplitModel::parameters() {
  return {&device_.conv1.weights, &device_.conv1.bias, &device_.conv2.weights,
          &device_.conv2.bias,    &server_.lstm.w_input, &server_.lstm.w_hidden,
          &server_.lstm.bias,     &server_.head.weights, &server_.head.bias};
}

ModelGrads SplitModel::zero_grads() const {
  return {nn::zeros_like(device_.conv1), nn::zeros_like(device_.conv2),
          nn::zeros_like(server_.lstm), nn::zeros_like(server_.head)};
}

Tensor SplitModel::device_forward(const Tensor& frame, DeviceCnn::Cache* cache) const {
  if (frame.shape() != Shape{shape_.img_h, shape_.img_w})
    throw DimensionError("device: frame shape " + slsim::to_string(frame.shape()));
  return device_.forward(frame, cache);
}

std::vector<Tensor> SplitModel::lstm_inputs(const std::vector<Tensor>& features,
                                            std::span<const double> powers) const {
  const std::size_t steps = powers.size();
  if (shape_.uses_images() && features.size() != steps)
    throw DimensionError("server: feature and power sequences differ in length");
  const std::size_t width = shape_.cut_width();
  std::vector<Tensor> inputs;
  inputs.reserve(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    Tensor x({shape_.lstm_input()});
    if (shape_.uses_images()) {
      if (features[j].size() != width)
        throw DimensionError("server: cut feature width " + std::to_string(features[j].size()) +
                             ", expected " + std::to_string(width));
      std::copy(features[j].values().begin(), features[j].values().end(), x.values().begin());
    }
    if (shape_.uses_power()) x[width] = powers[j];
    inputs.push_back(std::move(x));
  }
  return inputs;
}

double SplitModel::predict(const std::vector<Tensor>& features, std::span<const double> powers) const {
  const auto caches = nn::lstm_sequence(lstm_inputs(features, powers), server_.lstm);
  return nn::dense(caches.back().next.h, server_.head)[0];
}

ServerPass SplitModel::server_pass(const std::vector<WindowInputs>& batch, ModelGrads* grads) const {
  if (batch.empty()) throw DimensionError("server: empty minibatch");
  const std::size_t n = batch.size();
  std::vector<std::vector<nn::LstmCellCache>> caches(n);
  Tensor pred({n}), target({n});
  for (std::size_t b = 0; b < n; ++b) {
    caches[b] = nn::lstm_sequence(lstm_inputs(batch[b].features, batch[b].powers), server_.lstm);
    pred[b] = nn::dense(caches[b].back().next.h, server_.head)[0];
    target[b] = batch[b].target;
  }
  auto mse = nn::mse_loss(pred, target);
  ServerPass pass{mse.loss, pred.values(), {}};
  if (!grads) return pass;

  const std::size_t width = shape_.cut_width();
  pass.feature_grads.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    const Tensor& last_h = caches[b].back().next.h;
    auto head_g = nn::dense_backward(last_h, Tensor({1}, {mse.grad[b]}), server_.head);
    grads->head.weights += head_g.weights;
    grads->head.bias += head_g.bias;
    auto input_grads = nn::lstm_sequence_backward(caches[b], head_g.input, server_.lstm, grads->lstm);
    if (!shape_.uses_images()) continue;
    for (const auto& gx : input_grads) {
      std::vector<double> g(gx.values().begin(), gx.values().begin() + static_cast<long>(width));
      pass.feature_grads[b].emplace_back(Shape{width}, std::move(g));
    }
  }
  return pass;
}

}  // namespace slsim::splitsim
