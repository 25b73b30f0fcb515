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

#include "setscore/tensor.h"

#include <algorithm>
#include <cmath>

#include "setscore/errors.h"

namespace setscore {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    throw ContractViolation("Tensor: shape " + shape_string(shape_) +
                            " does not hold " + std::to_string(data_.size()) +
                            " values");
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  Shape shape{values.size()};
  return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw ContractViolation("Tensor::matrix: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n, m}, std::move(data));
}

std::size_t Tensor::rows() const {
  if (rank() != 2) {
    throw ContractViolation("expected a matrix, got shape " +
                            shape_string(shape_));
  }
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) {
    throw ContractViolation("expected a matrix, got shape " +
                            shape_string(shape_));
  }
  return shape_[1];
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t c = cols();
  return std::span<double>(data_).subspan(r * c, c);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t c = cols();
  return std::span<const double>(data_).subspan(r * c, c);
}

void Tensor::enable_grad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
}

void Tensor::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

std::span<double> Tensor::grad() {
  if (!has_grad()) {
    throw ContractViolation("tensor of shape " + shape_string(shape_) +
                            " has no gradient buffer");
  }
  return grad_;
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) {
    throw ContractViolation("tensor of shape " + shape_string(shape_) +
                            " has no gradient buffer");
  }
  return grad_;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* where) {
  if (a.shape() != b.shape()) {
    throw ContractViolation(std::string(where) + ": shape mismatch " +
                            shape_string(a.shape()) + " vs " +
                            shape_string(b.shape()));
  }
}

}  // namespace setscore
