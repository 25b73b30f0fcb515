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

// Raw outfit ingestion, filtering, popularity labeling, leak-free splitting,
// and the prepared-dataset directory format.

#ifndef SETSCORE_DATASET_H_
#define SETSCORE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "setscore/rng.h"
#include "setscore/wordvec.h"

namespace setscore {

struct RawItem {
  std::string item_id;
  std::string title;
  std::string category;
  std::vector<float> image_feature;
};

struct RawOutfit {
  std::string outfit_id;
  std::int64_t likes = 0;
  std::vector<RawItem> items;
};

// Dense ids for category names, in ascending name order.
struct CategoryVocab {
  std::vector<std::string> names;

  std::size_t size() const { return names.size(); }
  std::optional<std::size_t> id_of(const std::string& name) const;
};

// One item after preparation, carrying every modality in model-ready form.
struct Item {
  std::string item_id;
  std::string title;
  std::size_t category_id = 0;
  std::vector<double> image;
  std::vector<double> title_vector;
  std::size_t title_token_count = 0;  // tokens that hit the word table
};

struct LabeledOutfit {
  std::string outfit_id;
  int label = 0;
  std::vector<Item> items;
};

enum class Split { kTrain = 0, kDev = 1, kTest = 2 };
const char* split_name(Split split);
Split parse_split(const std::string& name);

using SplitAssignment = std::map<std::string, Split>;

struct SplitFractions {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct PercentileThresholds {
  std::int64_t p1 = 0;
  std::int64_t p40 = 0;
  std::int64_t p90 = 0;
  std::int64_t p99 = 0;
};

struct PipelineParams {
  std::size_t min_category_items = 500;
  std::size_t max_item_outfits = 5;
  std::size_t outfit_len = 4;
  std::size_t max_combos = 5;
  SplitFractions fractions;
  std::uint64_t seed = 0;
};

// --- stages, in pipeline order ---

// JSON Lines reader. Rejects duplicate outfit ids, malformed lines (with the
// line number) and image features whose length differs from the first one.
std::vector<RawOutfit> parse_outfits(std::istream& in);
std::vector<RawOutfit> parse_outfits(const std::filesystem::path& path);

struct CategoryFilterResult {
  std::vector<RawOutfit> outfits;
  CategoryVocab vocab;
};

// Drops items whose category has fewer than min_items distinct items, then
// drops emptied outfits.
CategoryFilterResult filter_categories(std::vector<RawOutfit> outfits,
                                       std::size_t min_items = 500);

// Drops items that occur in more than max_outfits outfits, then drops
// emptied outfits.
std::vector<RawOutfit> filter_frequent_items(std::vector<RawOutfit> outfits,
                                             std::size_t max_outfits = 5);

// ceil(p/100 * n)-th smallest value (1-based, clamped to [1, n]).
std::int64_t nearest_rank_percentile(const std::vector<std::int64_t>& sorted,
                                     double p);

struct LabelResult {
  std::vector<std::pair<RawOutfit, int>> labeled;
  PercentileThresholds thresholds;
  std::size_t dropped = 0;
};

// Likes in [p1,p40] -> 0, in [p90,p99] -> 1, otherwise dropped. Outfits that
// fall in both ranges (possible when p40 >= p90) are dropped with a warning.
LabelResult label_by_percentile(std::vector<RawOutfit> outfits,
                                std::vector<std::string>* warnings = nullptr);

// Connected components over shared item ids, shuffled, then assigned one at a
// time to the split furthest below its target outfit count.
SplitAssignment split_by_components(
    const std::vector<std::pair<RawOutfit, int>>& labeled,
    const SplitFractions& fractions, Rng& rng,
    std::vector<std::string>* warnings = nullptr);

// Exactly-L outfits pass through; longer ones yield min(max_combos, C(n,L))
// distinct L-subsets with ids "<outfit_id>~<k>"; shorter ones yield nothing.
std::vector<RawOutfit> normalize_length(const RawOutfit& outfit, std::size_t L,
                                        std::size_t max_combos, Rng& rng);

// --- prepared dataset ---

struct SplitCounts {
  std::size_t outfits = 0;
  std::size_t items = 0;  // distinct item ids
  std::size_t positives = 0;
};

struct PrepareSummary {
  SplitCounts train, dev, test, total;
  std::map<std::string, std::size_t> category_histogram;
  PercentileThresholds thresholds;
  std::size_t labeled_negatives = 0;
  std::size_t labeled_positives = 0;
  std::vector<std::string> warnings;
};

// Runs every stage and writes meta.json, {train,dev,test}.jsonl and
// summary.json into out_dir. Errors are rethrown prefixed with the stage name.
PrepareSummary prepare(const std::filesystem::path& raw_path,
                       const std::filesystem::path& wordvec_path,
                       const std::filesystem::path& out_dir,
                       const PipelineParams& params);

struct PreparedMeta {
  std::string schema;
  std::size_t outfit_len = 0;
  std::size_t image_dim = 0;
  std::size_t title_dim = 0;
  std::vector<std::string> categories;
  std::uint64_t seed = 0;
  PercentileThresholds thresholds;
};

struct PreparedDataset {
  PreparedMeta meta;
  std::vector<LabeledOutfit> train, dev, test;

  const std::vector<LabeledOutfit>& split(Split s) const;
  // Every distinct item of one split, ascending item id.
  std::vector<Item> items_of(Split s) const;
  // item id -> item over all splits; pointers stay valid while *this lives.
  std::map<std::string, const Item*> item_index() const;
};

PreparedDataset load_prepared(const std::filesystem::path& dir);

inline constexpr const char* kPreparedSchema = "prepared.v1";

}  // namespace setscore

#endif  // SETSCORE_DATASET_H_
