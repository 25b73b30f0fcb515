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

#include "setscore/layers.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "setscore/errors.h"

namespace setscore {
namespace {

void check_linear_shapes(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 ||
      x.dim(1) != w.dim(0) || w.dim(1) != b.dim(0)) {
    throw ContractViolation("linear: shape mismatch x" +
                            shape_string(x.shape()) + " W" +
                            shape_string(w.shape()) + " b" +
                            shape_string(b.shape()));
  }
}

}  // namespace

Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  check_linear_shapes(x, w, b);
  const std::size_t n = x.dim(0), in = x.dim(1), out = w.dim(1);
  Tensor y({n, out});
  for (std::size_t i = 0; i < n; ++i) {
    double* yi = y.row(i).data();
    for (std::size_t j = 0; j < out; ++j) yi[j] = b[j];
    for (std::size_t k = 0; k < in; ++k) {
      const double xik = x.at(i, k);
      if (xik == 0.0) continue;
      const double* wk = w.row(k).data();
      for (std::size_t j = 0; j < out; ++j) yi[j] += xik * wk[j];
    }
  }
  return y;
}

Tensor linear_backward(const Tensor& x, Tensor& w, Tensor& b, const Tensor& dy,
                       bool need_dx) {
  check_linear_shapes(x, w, b);
  const std::size_t n = x.dim(0), in = x.dim(1), out = w.dim(1);
  if (dy.rank() != 2 || dy.dim(0) != n || dy.dim(1) != out) {
    throw ContractViolation("linear_backward: dy" + shape_string(dy.shape()) +
                            " does not match output [" + std::to_string(n) +
                            "," + std::to_string(out) + "]");
  }
  w.enable_grad();
  b.enable_grad();
  auto gw = w.grad();
  auto gb = b.grad();
  for (std::size_t i = 0; i < n; ++i) {
    const double* dyi = dy.row(i).data();
    for (std::size_t j = 0; j < out; ++j) gb[j] += dyi[j];
    for (std::size_t k = 0; k < in; ++k) {
      const double xik = x.at(i, k);
      if (xik == 0.0) continue;
      double* gwk = &gw[k * out];
      for (std::size_t j = 0; j < out; ++j) gwk[j] += xik * dyi[j];
    }
  }
  if (!need_dx) return Tensor();
  Tensor dx({n, in});
  for (std::size_t i = 0; i < n; ++i) {
    const double* dyi = dy.row(i).data();
    for (std::size_t k = 0; k < in; ++k) {
      const double* wk = w.row(k).data();
      double acc = 0.0;
      for (std::size_t j = 0; j < out; ++j) acc += wk[j] * dyi[j];
      dx.at(i, k) = acc;
    }
  }
  return dx;
}

Tensor relu_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  require_same_shape(x, dy, "relu_backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(x[i] > 0.0)) dx[i] = 0.0;
  }
  return dx;
}

DropoutResult dropout_forward(const Tensor& x, double rate, bool training,
                              Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0,1), got " +
                      std::to_string(rate));
  }
  DropoutResult result{x, {}};
  if (!training || rate == 0.0) return result;
  const double keep_scale = 1.0 / (1.0 - rate);
  result.mask.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    result.mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    result.output[i] *= result.mask[i];
  }
  return result;
}

Tensor dropout_backward(std::span<const double> mask, const Tensor& dy) {
  if (mask.empty()) return dy;
  if (mask.size() != dy.size()) {
    throw ContractViolation("dropout_backward: mask length " +
                            std::to_string(mask.size()) + " vs dy shape " +
                            shape_string(dy.shape()));
  }
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
  return dx;
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids) {
  const std::size_t vocab = table.rows(), d = table.cols();
  Tensor out({ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= vocab) {
      throw DataError("embedding_lookup: id " + std::to_string(ids[i]) +
                      " out of range for table of " + std::to_string(vocab) +
                      " rows");
    }
    auto src = table.row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void embedding_backward(Tensor& table, std::span<const std::size_t> ids,
                        const Tensor& dy) {
  const std::size_t d = table.cols();
  if (dy.rank() != 2 || dy.dim(0) != ids.size() || dy.dim(1) != d) {
    throw ContractViolation("embedding_backward: dy" +
                            shape_string(dy.shape()) + " vs " +
                            std::to_string(ids.size()) + " ids of width " +
                            std::to_string(d));
  }
  table.enable_grad();
  auto g = table.grad();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= table.rows()) {
      throw DataError("embedding_backward: id " + std::to_string(ids[i]) +
                      " out of range");
    }
    for (std::size_t j = 0; j < d; ++j) g[ids[i] * d + j] += dy.at(i, j);
  }
}

Tensor concat_features(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractViolation("concat_features: no parts");
  const std::size_t n = parts[0].rows();
  std::size_t width = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != n) {
      throw ContractViolation("concat_features: leading extent mismatch " +
                              shape_string(parts[0].shape()) + " vs " +
                              shape_string(p.shape()));
    }
    width += p.cols();
  }
  Tensor out({n, width});
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = &out.at(i, 0);
    for (const Tensor& p : parts) {
      auto src = p.row(i);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

std::vector<Tensor> concat_backward(const Tensor& dy,
                                    std::span<const std::size_t> widths) {
  std::size_t total = 0;
  for (std::size_t w : widths) total += w;
  if (dy.cols() != total) {
    throw ContractViolation("concat_backward: dy" + shape_string(dy.shape()) +
                            " does not split into widths summing to " +
                            std::to_string(total));
  }
  const std::size_t n = dy.rows();
  std::vector<Tensor> parts;
  parts.reserve(widths.size());
  std::size_t offset = 0;
  for (std::size_t w : widths) {
    Tensor part({n, w});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < w; ++j) part.at(i, j) = dy.at(i, offset + j);
    }
    parts.push_back(std::move(part));
    offset += w;
  }
  return parts;
}

ReduceResult reduce_set(const Tensor& xs, Reduction kind) {
  const std::size_t m = xs.rows(), d = xs.cols();
  if (m == 0) {
    throw ContractViolation("reduce_set: empty set has no pooled vector");
  }
  ReduceResult r{Tensor({d}), {}, m};
  if (kind == Reduction::kMean) {
    for (std::size_t j = 0; j < d; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += xs.at(i, j);
      r.output[j] = sum / static_cast<double>(m);
    }
  } else {
    r.argmax.assign(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
      double best = xs.at(0, j);
      for (std::size_t i = 1; i < m; ++i) {
        if (xs.at(i, j) > best) {
          best = xs.at(i, j);
          r.argmax[j] = i;
        }
      }
      r.output[j] = best;
    }
  }
  return r;
}

Tensor reduce_set_backward(const ReduceResult& forward, Reduction kind,
                           const Tensor& dy) {
  require_same_shape(forward.output, dy, "reduce_set_backward");
  const std::size_t m = forward.rows, d = dy.size();
  Tensor dx({m, d});
  if (kind == Reduction::kMean) {
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < d; ++j) dx.at(i, j) = dy[j] * inv;
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) dx.at(forward.argmax[j], j) = dy[j];
  }
  return dx;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor tanh_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = std::tanh(v);
  return y;
}

Tensor tanh_backward(const Tensor& y, const Tensor& dy) {
  require_same_shape(y, dy, "tanh_backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= 1.0 - y[i] * y[i];
  return dx;
}

Tensor sigmoid_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = sigmoid(v);
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& dy) {
  require_same_shape(y, dy, "sigmoid_backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= y[i] * (1.0 - y[i]);
  return dx;
}

BceResult bce_with_logit(double logit, int label) {
  // softplus(z) = max(z,0) + log1p(exp(-|z|))
  const double softplus =
      std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
  const double y = label != 0 ? 1.0 : 0.0;
  return {softplus - y * logit, sigmoid(logit) - y};
}

}  // namespace setscore
