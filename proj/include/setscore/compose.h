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


// Scoring helpers, greedy outfit completion, constrained-composition
// evaluation, item importance, late fusion and top-K error listing.

#ifndef SETSCORE_COMPOSE_H_
#define SETSCORE_COMPOSE_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "setscore/dataset.h"
#include "setscore/metrics.h"
#include "setscore/model.h"
#include "setscore/rng.h"

namespace setscore {

// f(S): larger means a better outfit.
using OutfitScorer = std::function<double(ItemRefs)>;
using ItemScorer = std::function<double(const Item&)>;

// Inference-mode quality score of a trained model.
OutfitScorer model_scorer(const ModelConfig& config, const ModelParams& params,
                          Objective objective);

std::vector<Scored> score_outfits(const OutfitScorer& f,
                                  std::span<const LabeledOutfit> outfits);

struct RankingMetrics {
  double auc = 0.0;
  double ap = 0.0;
};
RankingMetrics ranking_metrics(std::span<const Scored> scored);

struct Composition {
  std::vector<const Item*> outfit;    // seed followed by the picks
  std::vector<const Item*> picks;
  std::vector<double> round_scores;   // f of the outfit after each pick
};

// Greedy completion: each round appends argmax_t f(S + {t}) over the unused
// candidates. Equal scores go to the lowest item_id. Throws
// ContractViolation when |seed| > target_len or there are too few candidates.
Composition compose(const OutfitScorer& f, std::span<const Item* const> candidates,
                    std::span<const Item* const> seed, std::size_t target_len);

struct EvalTuple {
  std::vector<std::string> seed;
  std::vector<std::string> candidates;
  std::vector<std::string> positives;
};

// Throws DataError unless positives are a non-empty subset of candidates and
// seed and candidates share no id.
void validate_tuple(const EvalTuple& tuple);

// One tuple per positive outfit: a random item becomes the held-out target,
// four database items not in the outfit are the confusion items, and the
// five candidates are shuffled.
std::vector<EvalTuple> build_auto_evalset(std::span<const LabeledOutfit> outfits,
                                          std::span<const Item* const> database,
                                          Rng& rng,
                                          std::size_t confusion_items = 4);

void write_eval_tuples(const std::filesystem::path& path,
                       std::span<const EvalTuple> tuples);
std::vector<EvalTuple> read_eval_tuples(const std::filesystem::path& path);

struct RankedCandidate {
  std::string item_id;
  double score = 0.0;
};

struct TupleOutcome {
  std::string chosen;
  bool hit = false;
  std::vector<RankedCandidate> ranked;  // descending score, then item_id
};

struct ConstrainedResult {
  double accuracy = 0.0;
  std::vector<TupleOutcome> outcomes;
};

using ItemIndex = std::map<std::string, const Item*>;

// Top-1 completion accuracy over the tuples.
ConstrainedResult constrained_accuracy(const OutfitScorer& f,
                                       std::span<const EvalTuple> tuples,
                                       const ItemIndex& index);

struct ImportanceEntry {
  std::string item_id;
  double decrement = 0.0;
};

// Decrement of f when each item is swapped for a random database item not
// already in the outfit, averaged over `replicates` swaps. Sorted by
// descending decrement, ties by item_id.
std::vector<ImportanceEntry> item_importance(const OutfitScorer& f,
                                             ItemRefs outfit,
                                             std::span<const Item* const> database,
                                             Rng& rng,
                                             std::size_t replicates = 1);

enum class Aggregate { kMean, kMax, kMin };
const char* aggregate_name(Aggregate a);
Aggregate parse_aggregate(std::string_view name);

double aggregate_scores(std::span<const double> scores, Aggregate a);

// Outfit score = aggregate of independent per-item scores.
std::vector<Scored> late_fusion_scores(const ItemScorer& item_scorer,
                                       std::span<const LabeledOutfit> outfits,
                                       Aggregate aggregate);

struct ErrorEntry {
  std::string outfit_id;
  double score = 0.0;
};

struct TopKErrors {
  std::size_t considered = 0;
  std::vector<ErrorEntry> errors;
  double error_rate = 0.0;
};

// Negatives among the top min(k, n) outfits by descending score (ties by
// outfit_id).
TopKErrors top_k_errors(const OutfitScorer& f,
                        std::span<const LabeledOutfit> outfits,
                        std::size_t k = 1000);

}  // namespace setscore

#endif  // SETSCORE_COMPOSE_H_
