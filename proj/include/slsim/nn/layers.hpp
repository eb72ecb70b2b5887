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

#include "slsim/rng.hpp"
#include "slsim/tensor.hpp"

namespace slsim::nn {

/// Non-overlapping pooling region, height by width.
struct PoolWindow {
  std::size_t h = 1;
  std::size_t w = 1;
  friend bool operator==(const PoolWindow&, const PoolWindow&) = default;
};

// Average pooling over [H,W] or [C,H,W] inputs. The window must tile the
// spatial extents exactly.
Tensor avg_pool(const Tensor& input, PoolWindow window);
Tensor avg_pool_backward(const Tensor& grad_output, PoolWindow window);

// Symmetric zero padding of the spatial axes of a [C,H,W] tensor, and its adjoint.
Tensor zero_pad(const Tensor& input, std::size_t pad);
Tensor zero_pad_backward(const Tensor& grad_output, std::size_t pad);

Tensor relu(const Tensor& input);
/// Subgradient at exactly zero is taken as zero.
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

/// Fills a tensor uniformly on [-1/sqrt(fan_in), 1/sqrt(fan_in)].
void init_fan_in(Tensor& t, std::size_t fan_in, Rng& rng);

struct Conv2dParams {
  Tensor weights;  // [C_out, C_in, k_h, k_w]
  Tensor bias;     // [C_out]
  std::size_t stride = 1;

  Conv2dParams() = default;
  Conv2dParams(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_h,
               std::size_t kernel_w, std::size_t stride = 1);

  std::size_t in_channels() const { return weights.dim(1); }
  std::size_t out_channels() const { return weights.dim(0); }
  std::size_t kernel_h() const { return weights.dim(2); }
  std::size_t kernel_w() const { return weights.dim(3); }
};

struct Conv2dGrads {
  Tensor input;  // left empty when not requested
  Tensor weights;
  Tensor bias;
};

/// Valid (unpadded) cross-correlation plus bias: [C_in,H,W] -> [C_out,H',W'].
Tensor conv2d(const Tensor& input, const Conv2dParams& params);
Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& grad_output,
                            const Conv2dParams& params, bool want_input_grad = true);

struct DenseParams {
  Tensor weights;  // [m, n]
  Tensor bias;     // [m]

  DenseParams() = default;
  DenseParams(std::size_t in_features, std::size_t out_features);
};

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

Tensor dense(const Tensor& input, const DenseParams& params);
DenseGrads dense_backward(const Tensor& input, const Tensor& grad_output,
                          const DenseParams& params);

/// LSTM weights with gate blocks stacked in the order input, forget,
/// candidate, output.
struct LstmParams {
  Tensor w_input;   // [4m, n]
  Tensor w_hidden;  // [4m, m]
  Tensor bias;      // [4m]

  LstmParams() = default;
  LstmParams(std::size_t input_size, std::size_t hidden_size);

  std::size_t input_size() const { return w_input.dim(1); }
  std::size_t hidden_size() const { return w_hidden.dim(1); }
};

struct LstmState {
  Tensor h;
  Tensor c;

  static LstmState zeros(std::size_t hidden_size);
};

/// Everything the backward pass of one cell needs.
struct LstmCellCache {
  Tensor input;
  LstmState prev;
  Tensor gate_i, gate_f, gate_g, gate_o;  // post-activation
  Tensor tanh_c;                          // tanh of the new cell state
  LstmState next;
};

struct LstmCellGrads {
  Tensor input;
  LstmState prev;  // gradients w.r.t. h and c of the previous state
};

LstmCellCache lstm_cell(const Tensor& input, const LstmState& state, const LstmParams& params);

/// Accumulates weight gradients into `param_grads` and returns gradients for
/// the cell's inputs.
LstmCellGrads lstm_cell_backward(const LstmCellCache& cache, const Tensor& grad_h,
                                 const Tensor& grad_c, const LstmParams& params,
                                 LstmParams& param_grads);

/// Runs the cell over a sequence starting from the zero state.
std::vector<LstmCellCache> lstm_sequence(const std::vector<Tensor>& inputs,
                                         const LstmParams& params);

/// Backpropagation through time given the gradient w.r.t. the last hidden
/// state only. Returns per-step input gradients.
std::vector<Tensor> lstm_sequence_backward(const std::vector<LstmCellCache>& caches,
                                           const Tensor& grad_last_h, const LstmParams& params,
                                           LstmParams& param_grads);

/// Zero-valued gradient buffers shaped like the given parameters.
LstmParams zeros_like(const LstmParams& params);
DenseParams zeros_like(const DenseParams& params);
Conv2dParams zeros_like(const Conv2dParams& params);

struct MseResult {
  double loss = 0.0;
  Tensor grad;
};

/// Mean of squared differences over the batch; grad[i] = 2(pred[i]-target[i])/B.
MseResult mse_loss(const Tensor& prediction, const Tensor& target);

}  // namespace slsim::nn
