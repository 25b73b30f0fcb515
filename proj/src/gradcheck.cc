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

#include "setscore/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "setscore/errors.h"
#include "setscore/rng.h"

namespace setscore {
namespace {

double checked_eval(const ScalarFn& fn, bool backward, const std::string& what) {
  const double value = fn(backward);
  if (!std::isfinite(value)) {
    throw NumericError("gradcheck: non-finite loss " + std::to_string(value) +
                       " " + what);
  }
  return value;
}

}  // namespace

GradcheckReport finite_diff_gradcheck(const ScalarFn& fn,
                                      std::span<const ParamRef> params,
                                      const GradcheckOptions& options) {
  for (const ParamRef& p : params) {
    p.tensor->enable_grad();
    p.tensor->zero_grad();
  }
  const double f0 = checked_eval(fn, true, "at the unperturbed point");
  const double resolution = 8.0 * std::numeric_limits<double>::epsilon() *
                            std::max(1.0, std::abs(f0)) / (2.0 * options.eps);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const ParamRef& p : params) {
    auto g = p.tensor->grad();
    analytic.emplace_back(g.begin(), g.end());
  }

  Rng rng(options.seed);
  GradcheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& t = *params[pi].tensor;
    std::vector<std::size_t> coords(t.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (coords.size() > options.coords_per_tensor) {
      rng.shuffle(std::span<std::size_t>(coords));
      coords.resize(options.coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t idx : coords) {
      const double original = t[idx];
      t[idx] = original + options.eps;
      const double plus = checked_eval(
          fn, false, "at +eps on " + params[pi].name + "[" +
                         std::to_string(idx) + "]");
      t[idx] = original - options.eps;
      const double minus = checked_eval(
          fn, false, "at -eps on " + params[pi].name + "[" +
                         std::to_string(idx) + "]");
      t[idx] = original;

      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double backprop = analytic[pi][idx];
      if (std::abs(backprop) < resolution && std::abs(numeric) < resolution) {
        ++report.coords_unresolved;
        continue;
      }
      const double denom =
          std::max(1e-8, std::abs(backprop) + std::abs(numeric));
      const double err = std::abs(backprop - numeric) / denom;
      ++report.coords_checked;
      if (report.worst_param.empty() || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = params[pi].name;
        report.worst_index = idx;
        report.worst_backprop = backprop;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace setscore
