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

#ifndef SETSCORE_TENSOR_H_
#define SETSCORE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace setscore {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array of doubles with an optional gradient buffer of the
// same length. A rank-0 tensor holds one value.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value) { return Tensor({}, {value}); }
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  // Rows and columns of a rank-2 tensor.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }

  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;

  bool has_grad() const { return !grad_.empty() || data_.empty(); }
  void enable_grad();
  void zero_grad();
  std::span<double> grad();
  std::span<const double> grad() const;

  bool all_finite() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

// Throws ContractViolation naming both shapes when they differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* where);

}  // namespace setscore

#endif  // SETSCORE_TENSOR_H_
