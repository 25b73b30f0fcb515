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


#include "setscore/model_gradcheck.h"

namespace setscore {

std::string ModelGradcheckCase::label() const {
  return std::string(objective_name(objective)) + " " +
         config.modalities.to_string() + " " + pooling_name(config.pooling);
}

std::vector<ModelGradcheckCase> default_gradcheck_cases() {
  ModelConfig base;
  base.embed_dim = 4;
  base.image_dim = 5;
  base.title_dim = 3;
  base.category_count = 3;
  base.category_embed_dim = 6;
  base.fusion_hidden = 6;
  base.dropout_rate = 0.5;
  std::vector<ModelGradcheckCase> cases;
  for (Pooling pooling : {Pooling::kMean, Pooling::kMax, Pooling::kRnn}) {
    for (const ModalitySet& m : ModalitySet::every_subset()) {
      ModelConfig c = base;
      c.modalities = m;
      c.pooling = pooling;
      cases.push_back({c, Objective::kClassification});
    }
  }
  for (const ModalitySet& m : ModalitySet::every_subset()) {
    ModelConfig c = base;
    c.modalities = m;
    cases.push_back({c, Objective::kSiamese});
  }
  return cases;
}

GradcheckReport gradcheck_model(const ModelGradcheckCase& test_case,
                                const GradcheckOptions& options,
                                bool inject_fault) {
  const ModelConfig& config = test_case.config;
  Rng rng(options.seed);
  ModelParams params = init_params(config, rng);
  // Nonzero biases so every bias path carries signal.
  for (const ParamRef& p : params.named()) {
    if (p.tensor->rank() <= 1) {
      for (double& v : p.tensor->data()) v += rng.uniform(-0.1, 0.1);
    }
  }

  std::vector<LabeledOutfit> outfits(3);
  for (std::size_t o = 0; o < outfits.size(); ++o) {
    outfits[o].outfit_id = "o" + std::to_string(o);
    outfits[o].label = o % 2 == 0 ? 1 : 0;
    for (std::size_t i = 0; i < 4; ++i) {
      Item item;
      item.item_id = outfits[o].outfit_id + "i" + std::to_string(i);
      item.category_id = rng.uniform_int(config.category_count);
      item.image.resize(config.image_dim);
      for (double& v : item.image) v = rng.normal();
      item.title_vector.resize(config.title_dim);
      for (double& v : item.title_vector) v = rng.normal();
      outfits[o].items.push_back(std::move(item));
    }
  }
  std::vector<const LabeledOutfit*> batch;
  for (const LabeledOutfit& o : outfits) batch.push_back(&o);

  const std::uint64_t mask_seed = rng.next_u64();
  ScalarFn fn = [&](bool backward) {
    Rng mask_rng(mask_seed);  // same dropout mask and pivots every call
    double loss = 0.0;
    if (test_case.objective == Objective::kClassification) {
      loss = outfit_loss(batch, config, params, mask_rng, Mode::kTrain, backward);
    } else {
      loss = siamese_batch_loss(batch, config, params, SiameseConfig{},
                                mask_rng, Mode::kTrain, backward);
    }
    if (backward && inject_fault) {
      for (double& g : params.fusion_w1.grad()) g = -g;
    }
    return loss;
  };
  auto named = params.named();
  return finite_diff_gradcheck(fn, named, options);
}

}  // namespace setscore
