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

// Outfit scoring network.
//
//   item  --(per-modality projection to d)--> concat --> Linear -> ReLU ->
//         Dropout -> Linear --> F [d]
//   outfit: {F_1..F_m} --(mean | max | tanh RNN)--> P [d]
//   score: sigmoid(w . P + b)
//
// The Siamese variant encodes a pivot item and pools the remaining items,
// scoring an outfit by the negative Euclidean distance between the two.

#ifndef SETSCORE_MODEL_H_
#define SETSCORE_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setscore/adam.h"
#include "setscore/dataset.h"
#include "setscore/gradcheck.h"
#include "setscore/layers.h"
#include "setscore/rng.h"
#include "setscore/tensor.h"

namespace setscore {

struct ModalitySet {
  bool image = false;
  bool title = false;
  bool category = false;

  static ModalitySet all() { return {true, true, true}; }
  // Accepts names joined by ',' or '+', e.g. "title,category"; "full" and
  // "all" select every modality.
  static ModalitySet parse(std::string_view text);
  // The 7 non-empty subsets, in a fixed order.
  static std::vector<ModalitySet> every_subset();

  std::size_t count() const { return image + title + category; }
  std::string to_string() const;  // e.g. "image+category"

  friend bool operator==(const ModalitySet&, const ModalitySet&) = default;
};

enum class Pooling { kMean, kMax, kRnn };
const char* pooling_name(Pooling p);
Pooling parse_pooling(std::string_view name);

enum class Objective { kClassification, kSiamese };
const char* objective_name(Objective o);
Objective parse_objective(std::string_view name);

enum class Mode { kTrain, kInfer };

struct ModelConfig {
  std::size_t embed_dim = 8;
  ModalitySet modalities = ModalitySet::all();
  Pooling pooling = Pooling::kMean;
  double dropout_rate = 0.5;
  std::size_t fusion_hidden = 0;  // 0: same as embed_dim
  std::size_t category_count = 1;
  std::size_t category_embed_dim = 256;
  std::size_t image_dim = 0;
  std::size_t title_dim = 0;
  std::size_t outfit_len = 4;

  std::size_t hidden_width() const {
    return fusion_hidden == 0 ? embed_dim : fusion_hidden;
  }

  // Throws ConfigError on an invalid combination.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct SiameseConfig {
  double margin = 10.0;
};

// Trainable tensors. Optional members exist only for the active modalities
// and pooling kind.
struct ModelParams {
  std::optional<Tensor> image_weight, image_bias;
  std::optional<Tensor> title_weight, title_bias;
  std::optional<Tensor> category_table, category_weight, category_bias;
  Tensor fusion_w1, fusion_b1, fusion_w2, fusion_b2;
  std::optional<Tensor> rnn_wh, rnn_wx, rnn_bias;
  Tensor classifier_weight, classifier_bias;

  // Adam state per tensor, aligned with named().
  std::vector<AdamState> adam;

  // Every present tensor under a stable dotted name, in a fixed order.
  std::vector<ParamRef> named();
  std::vector<std::pair<std::string, const Tensor*>> named() const;

  void zero_grads();
  bool all_finite() const;
};

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) for a [fan_in, fan_out]
// matrix (or a [fan_in] vector with fan_out = 1).
Tensor glorot_uniform(const Shape& shape, Rng& rng);

// Glorot-uniform weights, zero biases, Uniform(-0.05, 0.05) category table,
// zeroed Adam state.
ModelParams init_params(const ModelConfig& config, Rng& rng);

using ItemRefs = std::span<const Item* const>;
std::vector<const Item*> item_refs(const LabeledOutfit& outfit);

// Intermediate values of the item encoder, kept for the backward pass.
struct ItemEncoding {
  Tensor image_in, title_in;
  std::vector<std::size_t> category_ids;
  Tensor category_embedding;
  std::vector<Tensor> projected;  // active modalities in image/title/category order
  Tensor fused;
  Tensor hidden_pre;
  Tensor hidden;
  DropoutResult dropped;
  Tensor output;  // [m, d]
};

// Encodes m items at once; row i of `output` is F for items[i]. `rng` is only
// used (and required) in training mode with a positive dropout rate.
ItemEncoding encode_items(ItemRefs items, const ModelConfig& config,
                          const ModelParams& params, Mode mode,
                          Rng* rng = nullptr);
void encode_items_backward(const ItemEncoding& enc, const Tensor& d_output,
                           const ModelConfig& config, ModelParams& params);

// F for a single item, shape [d].
Tensor encode_item(const Item& item, const ModelConfig& config,
                   const ModelParams& params, Mode mode = Mode::kInfer,
                   Rng* rng = nullptr);

struct PoolState {
  Pooling kind = Pooling::kMean;
  Tensor inputs;                // [m, d]
  ReduceResult reduced;         // mean / max
  std::vector<Tensor> states;   // rnn: h_0 .. h_m, each [d]
  Tensor output;                // [d]
};

// Mean / max reduction or the tanh recurrence
// h_j = tanh(h_{j-1} W_h + F_j W_x + B), h_0 = 0, returning h_m.
PoolState pool_outfit(const Tensor& item_embeddings, const ModelConfig& config,
                      const ModelParams& params);
Tensor pool_outfit_backward(const PoolState& pool, const Tensor& d_output,
                            ModelParams& params);

struct ScoreResult {
  double probability = 0.5;
  double logit = 0.0;
};

struct OutfitPass {
  ItemEncoding items;
  PoolState pool;
  ScoreResult score;
};

OutfitPass forward_outfit(ItemRefs items, const ModelConfig& config,
                          const ModelParams& params, Mode mode,
                          Rng* rng = nullptr);
void backward_outfit(const OutfitPass& pass, double d_logit,
                     const ModelConfig& config, ModelParams& params);

// sigmoid(w . P + b) for one outfit; deterministic in inference mode.
ScoreResult score_outfit(ItemRefs items, const ModelConfig& config,
                         const ModelParams& params, Mode mode = Mode::kInfer,
                         Rng* rng = nullptr);
ScoreResult score_outfit(const LabeledOutfit& outfit, const ModelConfig& config,
                         const ModelParams& params);

// Mean binary cross-entropy over the batch. When `backward` is set,
// gradients of the mean are added into params.
double outfit_loss(std::span<const LabeledOutfit* const> batch,
                   const ModelConfig& config, ModelParams& params, Rng& rng,
                   Mode mode = Mode::kTrain, bool backward = true);

struct SiameseResult {
  double loss = 0.0;
  double distance = 0.0;
  std::size_t pivot = 0;
};

// Contrastive loss y d^2 + (1-y) max(margin - d, 0)^2 between a random pivot
// item and the pooled remaining items. Gradients are scaled by grad_scale.
SiameseResult siamese_loss(ItemRefs items, int label, const ModelConfig& config,
                           ModelParams& params, const SiameseConfig& siamese,
                           Rng& rng, Mode mode = Mode::kTrain,
                           bool backward = true, double grad_scale = 1.0);

// Plain contrastive loss value for a given distance.
double contrastive_loss_value(double distance, int label, double margin);

double siamese_batch_loss(std::span<const LabeledOutfit* const> batch,
                          const ModelConfig& config, ModelParams& params,
                          const SiameseConfig& siamese, Rng& rng,
                          Mode mode = Mode::kTrain, bool backward = true);

// Negative pivot-to-query distance with the first item as pivot.
double siamese_score(ItemRefs items, const ModelConfig& config,
                     const ModelParams& params);

// Outfit quality score for either objective (probability, or -distance).
double quality_score(ItemRefs items, const ModelConfig& config,
                     const ModelParams& params, Objective objective);

}  // namespace setscore

#endif  // SETSCORE_MODEL_H_
