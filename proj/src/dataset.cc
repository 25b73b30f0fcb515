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

#include "setscore/dataset.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "setscore/digest.h"
#include "setscore/errors.h"

namespace setscore {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

const json& require_field(const json& obj, const char* key,
                          std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError("line " + std::to_string(line_no) + ": missing field '" +
                    key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           std::size_t line_no) {
  const json& v = require_field(obj, key, line_no);
  if (!v.is_string()) {
    throw DataError("line " + std::to_string(line_no) + ": field '" + key +
                    "' must be a string");
  }
  return v.get<std::string>();
}

RawOutfit parse_outfit_line(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError("line " + std::to_string(line_no) +
                    ": malformed JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw DataError("line " + std::to_string(line_no) +
                    ": expected a JSON object");
  }
  RawOutfit outfit;
  outfit.outfit_id = require_string(j, "outfit_id", line_no);
  if (outfit.outfit_id.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": empty outfit_id");
  }
  const json& likes = require_field(j, "likes", line_no);
  if (!likes.is_number_integer() || likes.get<std::int64_t>() < 0) {
    throw DataError("line " + std::to_string(line_no) +
                    ": likes must be a non-negative integer");
  }
  outfit.likes = likes.get<std::int64_t>();
  const json& items = require_field(j, "items", line_no);
  if (!items.is_array() || items.empty()) {
    throw DataError("line " + std::to_string(line_no) +
                    ": items must be a non-empty array");
  }
  std::unordered_set<std::string> seen;
  for (const json& ji : items) {
    if (!ji.is_object()) {
      throw DataError("line " + std::to_string(line_no) +
                      ": item must be an object");
    }
    RawItem item;
    item.item_id = require_string(ji, "item_id", line_no);
    if (item.item_id.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty item_id");
    }
    item.title = require_string(ji, "title", line_no);
    item.category = require_string(ji, "category", line_no);
    const json& feat = require_field(ji, "image_feature", line_no);
    if (!feat.is_array()) {
      throw DataError("line " + std::to_string(line_no) +
                      ": image_feature must be an array");
    }
    item.image_feature.reserve(feat.size());
    for (const json& v : feat) {
      if (!v.is_number()) {
        throw DataError("line " + std::to_string(line_no) +
                        ": image_feature holds a non-number");
      }
      item.image_feature.push_back(v.get<float>());
    }
    if (!seen.insert(item.item_id).second) {
      throw DataError("line " + std::to_string(line_no) + ": item '" +
                      item.item_id + "' repeated within outfit '" +
                      outfit.outfit_id + "'");
    }
    outfit.items.push_back(std::move(item));
  }
  return outfit;
}

std::vector<RawOutfit> drop_empty(std::vector<RawOutfit> outfits) {
  std::erase_if(outfits, [](const RawOutfit& o) { return o.items.empty(); });
  return outfits;
}

// Union-find over outfit indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// C(n, k), saturating at a value above any realistic max_combos.
std::uint64_t binomial(std::size_t n, std::size_t k) {
  constexpr std::uint64_t kCap = std::uint64_t{1} << 40;
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result >= kCap) return kCap;
  }
  return result;
}

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(std::string(stage) + ": " + e.what());
  }
}

ordered_json item_to_json(const Item& item) {
  ordered_json j;
  j["item_id"] = item.item_id;
  j["title"] = item.title;
  j["category_id"] = item.category_id;
  j["image_feature"] = item.image;
  j["title_vector"] = item.title_vector;
  j["title_token_count"] = item.title_token_count;
  return j;
}

Item item_from_json(const json& j) {
  Item item;
  item.item_id = j.at("item_id").get<std::string>();
  item.title = j.at("title").get<std::string>();
  item.category_id = j.at("category_id").get<std::size_t>();
  item.image = j.at("image_feature").get<std::vector<double>>();
  item.title_vector = j.at("title_vector").get<std::vector<double>>();
  item.title_token_count = j.at("title_token_count").get<std::size_t>();
  return item;
}

ordered_json counts_to_json(const SplitCounts& c) {
  ordered_json j;
  j["outfits"] = c.outfits;
  j["items"] = c.items;
  j["positives"] = c.positives;
  return j;
}

ordered_json thresholds_to_json(const PercentileThresholds& t) {
  ordered_json j;
  j["p1"] = t.p1;
  j["p40"] = t.p40;
  j["p90"] = t.p90;
  j["p99"] = t.p99;
  return j;
}

SplitCounts count_split(const std::vector<LabeledOutfit>& outfits) {
  SplitCounts c;
  std::set<std::string> ids;
  for (const LabeledOutfit& o : outfits) {
    ++c.outfits;
    c.positives += o.label == 1 ? 1 : 0;
    for (const Item& item : o.items) ids.insert(item.item_id);
  }
  c.items = ids.size();
  return c;
}

std::vector<LabeledOutfit> read_split_file(const std::filesystem::path& path,
                                           const PreparedMeta& meta) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<LabeledOutfit> outfits;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      json j = json::parse(line);
      LabeledOutfit o;
      o.outfit_id = j.at("outfit_id").get<std::string>();
      o.label = j.at("label").get<int>();
      for (const json& ji : j.at("items")) o.items.push_back(item_from_json(ji));
      if (o.label != 0 && o.label != 1) throw DataError("label must be 0 or 1");
      if (o.items.size() != meta.outfit_len) {
        throw DataError("outfit has " + std::to_string(o.items.size()) +
                        " items, expected " + std::to_string(meta.outfit_len));
      }
      for (const Item& item : o.items) {
        if (item.category_id >= meta.categories.size() ||
            item.image.size() != meta.image_dim ||
            item.title_vector.size() != meta.title_dim) {
          throw DataError("item '" + item.item_id +
                          "' does not match the declared dimensions");
        }
      }
      outfits.push_back(std::move(o));
    } catch (const json::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) +
                      ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
  return outfits;
}

}  // namespace

std::optional<std::size_t> CategoryVocab::id_of(const std::string& name) const {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + name + "' (train|dev|test)");
}

std::vector<RawOutfit> parse_outfits(std::istream& in) {
  std::vector<RawOutfit> outfits;
  std::unordered_set<std::string> outfit_ids;
  std::optional<std::size_t> image_dim;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    RawOutfit outfit = parse_outfit_line(line, line_no);
    if (!outfit_ids.insert(outfit.outfit_id).second) {
      throw DataError("line " + std::to_string(line_no) +
                      ": duplicate outfit_id '" + outfit.outfit_id + "'");
    }
    for (const RawItem& item : outfit.items) {
      if (!image_dim) image_dim = item.image_feature.size();
      if (item.image_feature.size() != *image_dim) {
        throw DataError("line " + std::to_string(line_no) +
                        ": image_feature dimension " +
                        std::to_string(item.image_feature.size()) +
                        " differs from established dimension " +
                        std::to_string(*image_dim));
      }
    }
    outfits.push_back(std::move(outfit));
  }
  return outfits;
}

std::vector<RawOutfit> parse_outfits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open raw outfit file " + path.string());
  return parse_outfits(in);
}

CategoryFilterResult filter_categories(std::vector<RawOutfit> outfits,
                                       std::size_t min_items) {
  // Distinct items per category; an item keeps the category it was first
  // seen with.
  std::unordered_map<std::string, std::string> item_category;
  std::map<std::string, std::size_t> per_category;
  for (const RawOutfit& o : outfits) {
    for (const RawItem& item : o.items) {
      if (item_category.emplace(item.item_id, item.category).second) {
        ++per_category[item.category];
      }
    }
  }
  CategoryFilterResult result;
  for (const auto& [name, count] : per_category) {
    if (count >= min_items) result.vocab.names.push_back(name);
  }
  std::unordered_set<std::string> keep(result.vocab.names.begin(),
                                       result.vocab.names.end());
  for (RawOutfit& o : outfits) {
    std::erase_if(o.items, [&](const RawItem& item) {
      return !keep.contains(item_category.at(item.item_id));
    });
  }
  result.outfits = drop_empty(std::move(outfits));
  return result;
}

std::vector<RawOutfit> filter_frequent_items(std::vector<RawOutfit> outfits,
                                             std::size_t max_outfits) {
  std::unordered_map<std::string, std::size_t> occurrences;
  for (const RawOutfit& o : outfits) {
    for (const RawItem& item : o.items) ++occurrences[item.item_id];
  }
  for (RawOutfit& o : outfits) {
    std::erase_if(o.items, [&](const RawItem& item) {
      return occurrences.at(item.item_id) > max_outfits;
    });
  }
  return drop_empty(std::move(outfits));
}

std::int64_t nearest_rank_percentile(const std::vector<std::int64_t>& sorted,
                                     double p) {
  if (sorted.empty()) throw ContractViolation("percentile of an empty set");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

LabelResult label_by_percentile(std::vector<RawOutfit> outfits,
                                std::vector<std::string>* warnings) {
  if (outfits.empty()) {
    throw DataError("cannot label an empty outfit list");
  }
  if (outfits.size() < 100 && warnings) {
    warnings->push_back("label_by_percentile: only " +
                        std::to_string(outfits.size()) +
                        " outfits, percentiles are coarse");
  }
  std::vector<std::int64_t> likes;
  likes.reserve(outfits.size());
  for (const RawOutfit& o : outfits) likes.push_back(o.likes);
  std::sort(likes.begin(), likes.end());

  LabelResult result;
  PercentileThresholds& t = result.thresholds;
  t.p1 = nearest_rank_percentile(likes, 1);
  t.p40 = nearest_rank_percentile(likes, 40);
  t.p90 = nearest_rank_percentile(likes, 90);
  t.p99 = nearest_rank_percentile(likes, 99);

  std::size_t ambiguous = 0;
  for (RawOutfit& o : outfits) {
    const bool low = o.likes >= t.p1 && o.likes <= t.p40;
    const bool high = o.likes >= t.p90 && o.likes <= t.p99;
    if (low && high) {
      ++ambiguous;
      ++result.dropped;
    } else if (low) {
      result.labeled.emplace_back(std::move(o), 0);
    } else if (high) {
      result.labeled.emplace_back(std::move(o), 1);
    } else {
      ++result.dropped;
    }
  }
  if (ambiguous > 0 && warnings) {
    warnings->push_back("label_by_percentile: " + std::to_string(ambiguous) +
                        " outfits fall in both like ranges (p40=" +
                        std::to_string(t.p40) + " >= p90=" +
                        std::to_string(t.p90) + ") and were dropped");
  }
  return result;
}

SplitAssignment split_by_components(
    const std::vector<std::pair<RawOutfit, int>>& labeled,
    const SplitFractions& fractions, Rng& rng,
    std::vector<std::string>* warnings) {
  const double sum = fractions.train + fractions.dev + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9 || fractions.train < 0 || fractions.dev < 0 ||
      fractions.test < 0) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
  // Canonical order so the result depends only on content and rng.
  std::vector<std::size_t> order(labeled.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return labeled[a].first.outfit_id < labeled[b].first.outfit_id;
  });

  DisjointSets sets(order.size());
  std::unordered_map<std::string, std::size_t> owner;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    for (const RawItem& item : labeled[order[pos]].first.items) {
      auto [it, inserted] = owner.emplace(item.item_id, pos);
      if (!inserted) sets.unite(pos, it->second);
    }
  }
  // Components keyed by their root, which is the smallest member position.
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    components[sets.find(pos)].push_back(pos);
  }
  std::vector<std::vector<std::size_t>> shuffled;
  shuffled.reserve(components.size());
  for (auto& [root, members] : components) shuffled.push_back(std::move(members));
  rng.shuffle(std::span<std::vector<std::size_t>>(shuffled));

  const double total = static_cast<double>(labeled.size());
  const std::array<double, 3> targets = {
      fractions.train * total, fractions.dev * total, fractions.test * total};
  std::array<double, 3> counts = {0, 0, 0};
  SplitAssignment assignment;
  for (const auto& members : shuffled) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < 3; ++s) {
      if (targets[s] - counts[s] > targets[best] - counts[best]) best = s;
    }
    counts[best] += static_cast<double>(members.size());
    for (std::size_t pos : members) {
      assignment[labeled[order[pos]].first.outfit_id] =
          static_cast<Split>(best);
    }
  }
  if (warnings) {
    std::size_t largest = 0;
    for (const auto& members : shuffled) largest = std::max(largest, members.size());
    for (std::size_t s = 0; s < 3; ++s) {
      if (counts[s] == 0 && targets[s] > 0) {
        warnings->push_back(std::string("split_by_components: split '") +
                            split_name(static_cast<Split>(s)) +
                            "' is empty (largest component holds " +
                            std::to_string(largest) + " outfits)");
      }
    }
  }
  return assignment;
}

std::vector<RawOutfit> normalize_length(const RawOutfit& outfit, std::size_t L,
                                        std::size_t max_combos, Rng& rng) {
  const std::size_t n = outfit.items.size();
  if (n < L || L == 0) return {};
  if (n == L) return {outfit};

  std::vector<std::vector<std::size_t>> subsets;
  const std::uint64_t total = binomial(n, L);
  if (total <= max_combos) {
    // Enumerate every L-subset in lexicographic order.
    std::vector<std::size_t> idx(L);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      subsets.push_back(idx);
      std::size_t i = L;
      while (i > 0 && idx[i - 1] == n - L + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < L; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> pool(n);
    while (subsets.size() < max_combos) {
      std::iota(pool.begin(), pool.end(), 0);
      // Partial Fisher-Yates draws L distinct positions.
      for (std::size_t i = 0; i < L; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
        std::swap(pool[i], pool[j]);
      }
      std::vector<std::size_t> pick(pool.begin(), pool.begin() + L);
      std::sort(pick.begin(), pick.end());
      if (seen.insert(pick).second) subsets.push_back(std::move(pick));
    }
  }

  std::vector<RawOutfit> out;
  out.reserve(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    RawOutfit sub;
    sub.outfit_id = outfit.outfit_id + "~" + std::to_string(k);
    sub.likes = outfit.likes;
    for (std::size_t i : subsets[k]) sub.items.push_back(outfit.items[i]);
    out.push_back(std::move(sub));
  }
  return out;
}

PrepareSummary prepare(const std::filesystem::path& raw_path,
                       const std::filesystem::path& wordvec_path,
                       const std::filesystem::path& out_dir,
                       const PipelineParams& params) {
  PrepareSummary summary;
  auto& warnings = summary.warnings;

  auto raw = run_stage("parse", [&] { return parse_outfits(raw_path); });
  const WordVecTable table = run_stage(
      "wordvec", [&] { return load_wordvec_table(wordvec_path, &warnings); });
  std::size_t image_dim = 0;
  if (!raw.empty()) image_dim = raw.front().items.front().image_feature.size();

  auto filtered = run_stage("filter_categories", [&] {
    return filter_categories(std::move(raw), params.min_category_items);
  });
  auto outfits = run_stage("filter_frequent_items", [&] {
    return filter_frequent_items(std::move(filtered.outfits),
                                 params.max_item_outfits);
  });
  if (outfits.empty()) {
    throw DataError("filter_frequent_items: empty dataset, filtering removed "
                    "every outfit");
  }
  auto labels = run_stage("label_by_percentile", [&] {
    return label_by_percentile(std::move(outfits), &warnings);
  });
  if (labels.labeled.empty()) {
    throw DataError("label_by_percentile: empty dataset, no outfit received a "
                    "label");
  }
  summary.thresholds = labels.thresholds;
  for (const auto& [o, y] : labels.labeled) {
    (y == 1 ? summary.labeled_positives : summary.labeled_negatives) += 1;
  }

  const Rng base(params.seed);
  Rng split_rng = base.derive(1);
  const SplitAssignment assignment = run_stage("split_by_components", [&] {
    return split_by_components(labels.labeled, params.fractions, split_rng,
                               &warnings);
  });

  const Rng combo_base = base.derive(2);
  std::unordered_map<std::string, TitleEncoding> title_cache;
  std::array<std::vector<LabeledOutfit>, 3> splits;
  run_stage("normalize_length", [&] {
    for (const auto& [outfit, label] : labels.labeled) {
      Rng rng = combo_base.derive(fnv1a(outfit.outfit_id));
      for (RawOutfit& sub : normalize_length(outfit, params.outfit_len,
                                             params.max_combos, rng)) {
        LabeledOutfit lo;
        lo.outfit_id = sub.outfit_id;
        lo.label = label;
        for (const RawItem& raw_item : sub.items) {
          auto it = title_cache.find(raw_item.item_id);
          if (it == title_cache.end()) {
            it = title_cache
                     .emplace(raw_item.item_id,
                              encode_title(raw_item.title, table))
                     .first;
          }
          Item item;
          item.item_id = raw_item.item_id;
          item.title = raw_item.title;
          item.category_id = *filtered.vocab.id_of(raw_item.category);
          item.image.assign(raw_item.image_feature.begin(),
                            raw_item.image_feature.end());
          item.title_vector = it->second.vector;
          item.title_token_count = it->second.hits;
          lo.items.push_back(std::move(item));
        }
        splits[static_cast<std::size_t>(assignment.at(outfit.outfit_id))]
            .push_back(std::move(lo));
      }
    }
    return 0;
  });
  for (auto& s : splits) {
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
      return a.outfit_id < b.outfit_id;
    });
  }
  const std::size_t emitted =
      splits[0].size() + splits[1].size() + splits[2].size();
  if (emitted == 0) {
    throw DataError("normalize_length: empty dataset, no outfit has " +
                    std::to_string(params.outfit_len) + " or more items");
  }

  summary.train = count_split(splits[0]);
  summary.dev = count_split(splits[1]);
  summary.test = count_split(splits[2]);
  {
    std::set<std::string> all_items;
    std::map<std::string, std::set<std::string>> per_category;
    for (const auto& s : splits) {
      for (const LabeledOutfit& o : s) {
        for (const Item& item : o.items) {
          all_items.insert(item.item_id);
          per_category[filtered.vocab.names[item.category_id]].insert(
              item.item_id);
        }
      }
    }
    summary.total.outfits = emitted;
    summary.total.items = all_items.size();
    summary.total.positives =
        summary.train.positives + summary.dev.positives + summary.test.positives;
    for (const auto& [name, ids] : per_category) {
      summary.category_histogram[name] = ids.size();
    }
  }

  run_stage("write", [&] {
    std::filesystem::create_directories(out_dir);
    for (std::size_t s = 0; s < 3; ++s) {
      std::string body;
      for (const LabeledOutfit& o : splits[s]) {
        ordered_json j;
        j["outfit_id"] = o.outfit_id;
        j["label"] = o.label;
        j["items"] = ordered_json::array();
        for (const Item& item : o.items) j["items"].push_back(item_to_json(item));
        body += j.dump();
        body += '\n';
      }
      write_file_bytes(out_dir / (std::string(split_name(static_cast<Split>(s))) +
                                  ".jsonl"),
                       body);
    }

    ordered_json meta;
    meta["schema"] = kPreparedSchema;
    meta["outfit_len"] = params.outfit_len;
    meta["image_dim"] = image_dim;
    meta["title_dim"] = table.dim();
    meta["category_count"] = filtered.vocab.size();
    meta["categories"] = filtered.vocab.names;
    meta["counts"] = {{"train", summary.train.outfits},
                      {"dev", summary.dev.outfits},
                      {"test", summary.test.outfits}};
    meta["seed"] = params.seed;
    meta["thresholds"] = thresholds_to_json(summary.thresholds);
    meta["params"] = {{"min_category_items", params.min_category_items},
                      {"max_item_outfits", params.max_item_outfits},
                      {"max_combos", params.max_combos},
                      {"fractions",
                       {params.fractions.train, params.fractions.dev,
                        params.fractions.test}}};
    write_file_bytes(out_dir / "meta.json", meta.dump(2) + "\n");

    ordered_json sj;
    sj["splits"] = {{"train", counts_to_json(summary.train)},
                    {"dev", counts_to_json(summary.dev)},
                    {"test", counts_to_json(summary.test)},
                    {"total", counts_to_json(summary.total)}};
    sj["labeled"] = {{"negatives", summary.labeled_negatives},
                     {"positives", summary.labeled_positives}};
    sj["category_histogram"] = summary.category_histogram;
    write_file_bytes(out_dir / "summary.json", sj.dump(2) + "\n");
    return 0;
  });
  return summary;
}

const std::vector<LabeledOutfit>& PreparedDataset::split(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kDev:
      return dev;
    case Split::kTest:
      return test;
  }
  return train;
}

std::vector<Item> PreparedDataset::items_of(Split s) const {
  std::map<std::string, const Item*> seen;
  for (const LabeledOutfit& o : split(s)) {
    for (const Item& item : o.items) seen.emplace(item.item_id, &item);
  }
  std::vector<Item> items;
  items.reserve(seen.size());
  for (const auto& [id, item] : seen) items.push_back(*item);
  return items;
}

std::map<std::string, const Item*> PreparedDataset::item_index() const {
  std::map<std::string, const Item*> index;
  for (const auto* s : {&train, &dev, &test}) {
    for (const LabeledOutfit& o : *s) {
      for (const Item& item : o.items) index.emplace(item.item_id, &item);
    }
  }
  return index;
}

PreparedDataset load_prepared(const std::filesystem::path& dir) {
  PreparedDataset ds;
  try {
    const json meta = json::parse(read_file_bytes(dir / "meta.json"));
    ds.meta.schema = meta.at("schema").get<std::string>();
    if (ds.meta.schema != kPreparedSchema) {
      throw DataError("unsupported prepared schema '" + ds.meta.schema + "'");
    }
    ds.meta.outfit_len = meta.at("outfit_len").get<std::size_t>();
    ds.meta.image_dim = meta.at("image_dim").get<std::size_t>();
    ds.meta.title_dim = meta.at("title_dim").get<std::size_t>();
    ds.meta.categories = meta.at("categories").get<std::vector<std::string>>();
    ds.meta.seed = meta.at("seed").get<std::uint64_t>();
    const json& t = meta.at("thresholds");
    ds.meta.thresholds = {t.at("p1").get<std::int64_t>(),
                          t.at("p40").get<std::int64_t>(),
                          t.at("p90").get<std::int64_t>(),
                          t.at("p99").get<std::int64_t>()};
  } catch (const json::exception& e) {
    throw DataError((dir / "meta.json").string() + ": " + e.what());
  }
  ds.train = read_split_file(dir / "train.jsonl", ds.meta);
  ds.dev = read_split_file(dir / "dev.jsonl", ds.meta);
  ds.test = read_split_file(dir / "test.jsonl", ds.meta);
  return ds;
}

}  // namespace setscore
