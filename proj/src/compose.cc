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


#include "setscore/compose.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"
#include "setscore/errors.h"

namespace setscore {
namespace {

using nlohmann::json;

// Candidate wins over the incumbent on a higher score, or on an equal score
// with a smaller id.
bool better(double score, const std::string& id, double best_score,
            const std::string* best_id) {
  if (best_id == nullptr) return true;
  if (score != best_score) return score > best_score;
  return id < *best_id;
}

const Item* resolve(const ItemIndex& index, const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) {
    throw DataError("evaluation tuple references unknown item '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> string_list(const json& j, const char* key,
                                     std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw DataError("tuples line " + std::to_string(line) + ": missing array '" +
                    key + "'");
  }
  std::vector<std::string> out;
  for (const json& v : *it) {
    if (!v.is_string()) {
      throw DataError("tuples line " + std::to_string(line) + ": '" + key +
                      "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

OutfitScorer model_scorer(const ModelConfig& config, const ModelParams& params,
                          Objective objective) {
  return [&config, &params, objective](ItemRefs items) {
    return quality_score(items, config, params, objective);
  };
}

std::vector<Scored> score_outfits(const OutfitScorer& f,
                                  std::span<const LabeledOutfit> outfits) {
  std::vector<Scored> out;
  out.reserve(outfits.size());
  for (const LabeledOutfit& outfit : outfits) {
    auto refs = item_refs(outfit);
    out.push_back({f(refs), outfit.label});
  }
  return out;
}

RankingMetrics ranking_metrics(std::span<const Scored> scored) {
  return {auc(scored), average_precision(scored)};
}

Composition compose(const OutfitScorer& f, std::span<const Item* const> candidates,
                    std::span<const Item* const> seed, std::size_t target_len) {
  if (seed.size() > target_len) {
    throw ContractViolation("compose: seed has " + std::to_string(seed.size()) +
                            " items, target length is " +
                            std::to_string(target_len));
  }
  const std::size_t rounds = target_len - seed.size();
  if (rounds > candidates.size()) {
    throw ContractViolation("compose: " + std::to_string(rounds) +
                            " picks needed from " +
                            std::to_string(candidates.size()) + " candidates");
  }
  Composition result;
  result.outfit.assign(seed.begin(), seed.end());
  std::vector<bool> used(candidates.size(), false);
  for (std::size_t round = 0; round < rounds; ++round) {
    std::size_t best = candidates.size();
    double best_score = 0.0;
    result.outfit.push_back(nullptr);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      result.outfit.back() = candidates[c];
      const double s = f(result.outfit);
      const std::string* best_id =
          best == candidates.size() ? nullptr : &candidates[best]->item_id;
      if (better(s, candidates[c]->item_id, best_score, best_id)) {
        best = c;
        best_score = s;
      }
    }
    used[best] = true;
    result.outfit.back() = candidates[best];
    result.picks.push_back(candidates[best]);
    result.round_scores.push_back(best_score);
  }
  return result;
}

void validate_tuple(const EvalTuple& t) {
  if (t.candidates.empty()) throw DataError("tuple has no candidates");
  if (t.positives.empty()) throw DataError("tuple has no positives");
  const std::set<std::string> cands(t.candidates.begin(), t.candidates.end());
  if (cands.size() != t.candidates.size()) {
    throw DataError("tuple repeats a candidate");
  }
  for (const std::string& p : t.positives) {
    if (!cands.contains(p)) {
      throw DataError("tuple positive '" + p + "' is not a candidate");
    }
  }
  for (const std::string& s : t.seed) {
    if (cands.contains(s)) {
      throw DataError("tuple seed item '" + s + "' is also a candidate");
    }
  }
}

std::vector<EvalTuple> build_auto_evalset(std::span<const LabeledOutfit> outfits,
                                          std::span<const Item* const> database,
                                          Rng& rng,
                                          std::size_t confusion_items) {
  std::vector<EvalTuple> tuples;
  for (const LabeledOutfit& outfit : outfits) {
    if (outfit.label != 1) continue;
    std::set<std::string> in_outfit;
    for (const Item& item : outfit.items) in_outfit.insert(item.item_id);
    std::vector<const Item*> eligible;
    for (const Item* item : database) {
      if (!in_outfit.contains(item->item_id)) eligible.push_back(item);
    }
    if (eligible.size() < confusion_items) {
      throw DataError("build_auto_evalset: only " +
                      std::to_string(eligible.size()) +
                      " database items outside outfit '" + outfit.outfit_id +
                      "', need " + std::to_string(confusion_items));
    }
    const std::size_t target = rng.uniform_int(outfit.items.size());
    EvalTuple t;
    for (std::size_t i = 0; i < outfit.items.size(); ++i) {
      if (i != target) t.seed.push_back(outfit.items[i].item_id);
    }
    // Partial Fisher-Yates over the eligible pool.
    for (std::size_t k = 0; k < confusion_items; ++k) {
      const std::size_t j = k + rng.uniform_int(eligible.size() - k);
      std::swap(eligible[k], eligible[j]);
      t.candidates.push_back(eligible[k]->item_id);
    }
    t.candidates.push_back(outfit.items[target].item_id);
    rng.shuffle(std::span<std::string>(t.candidates));
    t.positives.push_back(outfit.items[target].item_id);
    validate_tuple(t);
    tuples.push_back(std::move(t));
  }
  return tuples;
}

void write_eval_tuples(const std::filesystem::path& path,
                       std::span<const EvalTuple> tuples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const EvalTuple& t : tuples) {
    nlohmann::ordered_json j;
    j["seed"] = t.seed;
    j["candidates"] = t.candidates;
    j["positives"] = t.positives;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<EvalTuple> read_eval_tuples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<EvalTuple> tuples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("tuples line " + std::to_string(line_no) + ": " +
                      e.what());
    }
    EvalTuple t{string_list(j, "seed", line_no),
                string_list(j, "candidates", line_no),
                string_list(j, "positives", line_no)};
    try {
      validate_tuple(t);
    } catch (const DataError& e) {
      throw DataError("tuples line " + std::to_string(line_no) + ": " +
                      e.what());
    }
    tuples.push_back(std::move(t));
  }
  return tuples;
}

ConstrainedResult constrained_accuracy(const OutfitScorer& f,
                                       std::span<const EvalTuple> tuples,
                                       const ItemIndex& index) {
  if (tuples.empty()) throw ContractViolation("constrained_accuracy: no tuples");
  ConstrainedResult result;
  std::size_t hits = 0;
  for (const EvalTuple& t : tuples) {
    std::vector<const Item*> seed, cands;
    for (const std::string& id : t.seed) seed.push_back(resolve(index, id));
    for (const std::string& id : t.candidates) cands.push_back(resolve(index, id));

    TupleOutcome outcome;
    std::vector<const Item*> probe = seed;
    probe.push_back(nullptr);
    for (const Item* c : cands) {
      probe.back() = c;
      outcome.ranked.push_back({c->item_id, f(probe)});
    }
    std::sort(outcome.ranked.begin(), outcome.ranked.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.item_id < b.item_id;
              });
    Composition comp = compose(f, cands, seed, seed.size() + 1);
    outcome.chosen = comp.picks.front()->item_id;
    outcome.hit = std::find(t.positives.begin(), t.positives.end(),
                            outcome.chosen) != t.positives.end();
    hits += outcome.hit;
    result.outcomes.push_back(std::move(outcome));
  }
  result.accuracy =
      static_cast<double>(hits) / static_cast<double>(tuples.size());
  return result;
}

std::vector<ImportanceEntry> item_importance(const OutfitScorer& f,
                                             ItemRefs outfit,
                                             std::span<const Item* const> database,
                                             Rng& rng,
                                             std::size_t replicates) {
  if (outfit.empty()) throw ContractViolation("item_importance: empty outfit");
  if (replicates == 0) throw ConfigError("item_importance: replicates must be >= 1");
  std::set<std::string> in_outfit;
  for (const Item* item : outfit) in_outfit.insert(item->item_id);
  std::vector<const Item*> pool;
  for (const Item* item : database) {
    if (!in_outfit.contains(item->item_id)) pool.push_back(item);
  }
  if (pool.empty()) {
    throw DataError("item_importance: no replacement items outside the outfit");
  }
  const double p0 = f(outfit);
  std::vector<ImportanceEntry> entries;
  std::vector<const Item*> probe(outfit.begin(), outfit.end());
  for (std::size_t j = 0; j < outfit.size(); ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
      probe[j] = pool[rng.uniform_int(pool.size())];
      sum += f(probe);
    }
    probe[j] = outfit[j];
    entries.push_back(
        {outfit[j]->item_id, p0 - sum / static_cast<double>(replicates)});
  }
  std::sort(entries.begin(), entries.end(),
            [](const ImportanceEntry& a, const ImportanceEntry& b) {
              if (a.decrement != b.decrement) return a.decrement > b.decrement;
              return a.item_id < b.item_id;
            });
  return entries;
}

const char* aggregate_name(Aggregate a) {
  switch (a) {
    case Aggregate::kMean:
      return "mean";
    case Aggregate::kMax:
      return "max";
    case Aggregate::kMin:
      return "min";
  }
  return "?";
}

Aggregate parse_aggregate(std::string_view name) {
  if (name == "mean") return Aggregate::kMean;
  if (name == "max") return Aggregate::kMax;
  if (name == "min") return Aggregate::kMin;
  throw ConfigError("unknown aggregate '" + std::string(name) +
                    "' (mean|max|min)");
}

double aggregate_scores(std::span<const double> scores, Aggregate a) {
  if (scores.empty()) throw ContractViolation("aggregate_scores: no scores");
  switch (a) {
    case Aggregate::kMean:
      return std::accumulate(scores.begin(), scores.end(), 0.0) /
             static_cast<double>(scores.size());
    case Aggregate::kMax:
      return *std::max_element(scores.begin(), scores.end());
    case Aggregate::kMin:
      return *std::min_element(scores.begin(), scores.end());
  }
  return 0.0;
}

std::vector<Scored> late_fusion_scores(const ItemScorer& item_scorer,
                                       std::span<const LabeledOutfit> outfits,
                                       Aggregate aggregate) {
  std::vector<Scored> out;
  out.reserve(outfits.size());
  std::vector<double> item_scores;
  for (const LabeledOutfit& outfit : outfits) {
    item_scores.clear();
    for (const Item& item : outfit.items) item_scores.push_back(item_scorer(item));
    out.push_back({aggregate_scores(item_scores, aggregate), outfit.label});
  }
  return out;
}

TopKErrors top_k_errors(const OutfitScorer& f,
                        std::span<const LabeledOutfit> outfits, std::size_t k) {
  struct Row {
    const LabeledOutfit* outfit;
    double score;
  };
  std::vector<Row> rows;
  rows.reserve(outfits.size());
  for (const LabeledOutfit& outfit : outfits) {
    auto refs = item_refs(outfit);
    rows.push_back({&outfit, f(refs)});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.outfit->outfit_id < b.outfit->outfit_id;
  });
  TopKErrors result;
  result.considered = std::min(k, rows.size());
  for (std::size_t i = 0; i < result.considered; ++i) {
    if (rows[i].outfit->label == 0) {
      result.errors.push_back({rows[i].outfit->outfit_id, rows[i].score});
    }
  }
  if (result.considered > 0) {
    result.error_rate = static_cast<double>(result.errors.size()) /
                        static_cast<double>(result.considered);
  }
  return result;
}

}  // namespace setscore
