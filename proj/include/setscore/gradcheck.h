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

#ifndef SETSCORE_GRADCHECK_H_
#define SETSCORE_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "setscore/tensor.h"

namespace setscore {

struct ParamRef {
  std::string name;
  Tensor* tensor;
};

struct GradcheckOptions {
  double eps = 1e-5;
  // Coordinates sampled per tensor; smaller tensors are checked fully.
  std::size_t coords_per_tensor = 64;
  std::uint64_t seed = 0;
};

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_backprop = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
  // Coordinates where both estimates sit below the central-difference
  // roundoff resolution; these are counted but not scored.
  std::size_t coords_unresolved = 0;
};

// Evaluates the scalar loss; when `backward` is true it must also accumulate
// gradients into the parameters. Must be deterministic across calls.
using ScalarFn = std::function<double(bool backward)>;

// Compares backprop gradients against central differences
// (f(x+eps) - f(x-eps)) / (2 eps) on sampled coordinates. The error of one
// coordinate is |g_bp - g_fd| / max(1e-8, |g_bp| + |g_fd|). A coordinate is
// skipped when |g_bp| and |g_fd| are both below 8 * DBL_EPSILON *
// max(1, |f|) / (2 eps), the smallest slope the difference can resolve.
// Parameter values are restored before returning.
GradcheckReport finite_diff_gradcheck(const ScalarFn& fn,
                                      std::span<const ParamRef> params,
                                      const GradcheckOptions& options = {});

}  // namespace setscore

#endif  // SETSCORE_GRADCHECK_H_
