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

#include "setscore/adam.h"

#include <cmath>
#include <string>

#include "setscore/errors.h"

namespace setscore {

void adam_step(Tensor& param, AdamState& state, const AdamHyper& hyper) {
  if (!param.has_grad() || param.grad().size() != param.size()) {
    throw ContractViolation("adam_step: parameter of shape " +
                            shape_string(param.shape()) +
                            " has no populated gradient");
  }
  if (state.m.size() != param.size() || state.v.size() != param.size()) {
    throw ContractViolation("adam_step: state does not match parameter shape " +
                            shape_string(param.shape()));
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bias1 = 1.0 - std::pow(hyper.beta1, t);
  const double bias2 = 1.0 - std::pow(hyper.beta2, t);
  auto grad = param.grad();
  auto values = param.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = grad[i];
    state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
    state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    values[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
}

}  // namespace setscore
