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


// Finite-difference checks of the full scorer on small random outfits.

#ifndef SETSCORE_MODEL_GRADCHECK_H_
#define SETSCORE_MODEL_GRADCHECK_H_

#include <string>
#include <vector>

#include "setscore/gradcheck.h"
#include "setscore/model.h"

namespace setscore {

struct ModelGradcheckCase {
  ModelConfig config;
  Objective objective = Objective::kClassification;

  std::string label() const;
};

// Every modality subset with every pooling kind for the classification loss,
// then every modality subset with mean pooling for the contrastive loss.
std::vector<ModelGradcheckCase> default_gradcheck_cases();

// Random parameters and a batch of three 4-item outfits. Dropout stays on
// with a mask that is identical on every evaluation. With inject_fault the
// fusion.w1 gradient is negated after backward.
GradcheckReport gradcheck_model(const ModelGradcheckCase& test_case,
                                const GradcheckOptions& options,
                                bool inject_fault = false);

}  // namespace setscore

#endif  // SETSCORE_MODEL_GRADCHECK_H_
