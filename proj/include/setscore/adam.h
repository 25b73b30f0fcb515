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

#ifndef SETSCORE_ADAM_H_
#define SETSCORE_ADAM_H_

#include <cstdint>
#include <vector>

#include "setscore/tensor.h"

namespace setscore {

struct AdamHyper {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment estimates for one parameter tensor.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  static AdamState zeros_like(const Tensor& param) {
    return {std::vector<double>(param.size(), 0.0),
            std::vector<double>(param.size(), 0.0), 0};
  }
};

// One bias-corrected Adam update. Reads param.grad (left intact).
void adam_step(Tensor& param, AdamState& state, const AdamHyper& hyper);

}  // namespace setscore

#endif  // SETSCORE_ADAM_H_
