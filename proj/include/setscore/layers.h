// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Differentiable layer primitives. Every forward has a hand-written
// backward. Backward functions accumulate (+=) into parameter gradient
// buffers and return the gradient with respect to the layer input.

#ifndef SETSCORE_LAYERS_H_
#define SETSCORE_LAYERS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "setscore/rng.h"
#include "setscore/tensor.h"

namespace setscore {

// y[i,j] = sum_k x[i,k] * w[k,j] + b[j]
Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b);

// Adds x^T dy into w.grad and column sums of dy into b.grad. Returns
// dx = dy w^T, or an empty tensor when need_dx is false.
Tensor linear_backward(const Tensor& x, Tensor& w, Tensor& b, const Tensor& dy,
                       bool need_dx = true);

Tensor relu_forward(const Tensor& x);
// Subgradient at 0 is 0.
Tensor relu_backward(const Tensor& x, const Tensor& dy);

struct DropoutResult {
  Tensor output;
  // Per-element multiplier: 0 or 1/(1-rate). Empty when the pass was identity.
  std::vector<double> mask;
};

// Inverted dropout. Identity when !training or rate == 0.
DropoutResult dropout_forward(const Tensor& x, double rate, bool training,
                              Rng& rng);
Tensor dropout_backward(std::span<const double> mask, const Tensor& dy);

// Row i of the result is table[ids[i]].
Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids);
// Scatter-adds rows of dy into table.grad; duplicate ids accumulate.
void embedding_backward(Tensor& table, std::span<const std::size_t> ids,
                        const Tensor& dy);

Tensor concat_features(std::span<const Tensor> parts);
// Splits dy column-wise back into pieces of the given widths.
std::vector<Tensor> concat_backward(const Tensor& dy,
                                    std::span<const std::size_t> widths);

enum class Reduction { kMean, kMax };

struct ReduceResult {
  Tensor output;                     // [d]
  std::vector<std::size_t> argmax;   // per column; filled for kMax only
  std::size_t rows = 0;
};

// Column-wise mean or max over the rows of xs [m,d]; m must be >= 1.
// Max ties resolve to the lowest row index.
ReduceResult reduce_set(const Tensor& xs, Reduction kind);
Tensor reduce_set_backward(const ReduceResult& forward, Reduction kind,
                           const Tensor& dy);

double sigmoid(double x);

Tensor tanh_forward(const Tensor& x);
// Takes the forward output y; dx = dy * (1 - y^2).
Tensor tanh_backward(const Tensor& y, const Tensor& dy);

Tensor sigmoid_forward(const Tensor& x);
// Takes the forward output y; dx = dy * y * (1 - y).
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);

struct BceResult {
  double loss;
  double dlogit;
};

// softplus(logit) - label * logit, and its derivative sigmoid(logit) - label.
BceResult bce_with_logit(double logit, int label);

}  // namespace setscore

#endif  // SETSCORE_LAYERS_H_
