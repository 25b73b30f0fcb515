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


#include "setscore/metrics.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "setscore/errors.h"

namespace setscore {

double auc(std::span<const Scored> scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].score < scored[b].score;
  });
  // Sum of midranks of the positives.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scored[order[j]].score == scored[order[i]].score) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (scored[order[k]].label != 0) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scored.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("auc: needs at least one positive and one negative (got " +
                    std::to_string(positives) + " / " +
                    std::to_string(negatives) + ")");
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double average_precision(std::span<const Scored> scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scored[a].score > scored[b].score;
                   });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (scored[order[rank]].label == 0) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  if (hits == 0) throw DataError("average_precision: no positives");
  return sum / static_cast<double>(hits);
}

}  // namespace setscore
