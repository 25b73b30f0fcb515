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


// Ranking metrics over (score, label) pairs.

#ifndef SETSCORE_METRICS_H_
#define SETSCORE_METRICS_H_

#include <span>

namespace setscore {

struct Scored {
  double score = 0.0;
  int label = 0;
};

// Mann-Whitney statistic: fraction of (positive, negative) pairs with the
// positive scored higher, ties counting one half. Throws DataError unless
// both classes are present.
double auc(std::span<const Scored> scored);

// Mean precision at the rank of each positive, walking scores in descending
// order. Equal scores keep their input order. Throws DataError without
// positives.
double average_precision(std::span<const Scored> scored);

}  // namespace setscore

#endif  // SETSCORE_METRICS_H_
