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


#include "setscore/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "setscore/errors.h"
#include "setscore/rng.h"

namespace setscore {
namespace {

constexpr const char* kGenericTokens[] = {"shirt", "dress", "bag",   "shoe",
                                          "top",   "skirt", "coat",  "hat",
                                          "jeans", "scarf", "boots", "belt"};

// Four decimals keep the JSON short and survive the float round trip.
double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::string cluster_token(std::size_t g, std::size_t k) {
  return "g" + std::to_string(g) + "w" + std::to_string(k);
}

std::string format_vector_line(const std::string& token,
                               const std::vector<double>& v) {
  std::string line = token;
  char buf[32];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, " %.4f", x);
    line += buf;
  }
  return line;
}

std::string padded(const char* prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (outfits == 0) throw ConfigError("synth: outfits must be positive");
  if (clusters < 2) throw ConfigError("synth: need at least 2 clusters");
  if (!(noise >= 0.0)) throw ConfigError("synth: noise must be >= 0");
  if (image_dim == 0 || title_dim == 0) {
    throw ConfigError("synth: feature dimensions must be positive");
  }
  if (outfit_len < 2) throw ConfigError("synth: outfit_len must be >= 2");
  if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) {
    throw ConfigError("synth: positive_fraction must lie in (0,1)");
  }
  if (categories_per_cluster == 0 || tokens_per_cluster == 0 ||
      max_item_reuse == 0) {
    throw ConfigError("synth: per-cluster counts must be positive");
  }
}

SynthCorpus generate_synthetic(const SynthConfig& c) {
  c.validate();
  const Rng base(c.seed);
  Rng centroid_rng = base.derive(1);
  Rng rng = base.derive(2);
  Rng likes_rng = base.derive(3);

  std::vector<std::vector<double>> image_centroid(c.clusters);
  std::vector<std::vector<double>> title_centroid(c.clusters);
  for (std::size_t g = 0; g < c.clusters; ++g) {
    image_centroid[g].resize(c.image_dim);
    for (double& v : image_centroid[g]) v = centroid_rng.normal();
    title_centroid[g].resize(c.title_dim);
    for (double& v : title_centroid[g]) v = centroid_rng.normal();
  }

  SynthCorpus corpus;
  for (std::size_t g = 0; g < c.clusters; ++g) {
    for (std::size_t k = 0; k < c.tokens_per_cluster; ++k) {
      std::vector<double> v(c.title_dim);
      for (std::size_t i = 0; i < c.title_dim; ++i) {
        v[i] = round4(title_centroid[g][i] + c.noise * centroid_rng.normal());
      }
      corpus.wordvec_lines.push_back(format_vector_line(cluster_token(g, k), v));
    }
  }
  for (const char* token : kGenericTokens) {
    std::vector<double> v(c.title_dim);
    for (double& x : v) x = round4(centroid_rng.normal());
    corpus.wordvec_lines.push_back(format_vector_line(token, v));
  }

  const std::size_t category_count = c.clusters * c.categories_per_cluster;
  auto category_name = [&](std::size_t id) { return padded("cat", id, 2); };

  std::vector<RawItem> items;
  std::vector<std::size_t> uses;
  std::vector<std::vector<std::size_t>> reusable(c.clusters);

  auto fresh_item = [&](std::size_t g) {
    RawItem item;
    item.item_id = padded("i", items.size(), 7);
    item.image_feature.resize(c.image_dim);
    for (std::size_t i = 0; i < c.image_dim; ++i) {
      item.image_feature[i] = static_cast<float>(
          round4(image_centroid[g][i] + c.noise * rng.normal()));
    }
    std::size_t cat = g * c.categories_per_cluster +
                      rng.uniform_int(c.categories_per_cluster);
    if (rng.bernoulli(c.stray_category_rate)) cat = rng.uniform_int(category_count);
    item.category = category_name(cat);
    const std::size_t a = rng.uniform_int(c.tokens_per_cluster);
    const std::size_t b = rng.uniform_int(c.tokens_per_cluster);
    item.title = cluster_token(g, a) + " " + cluster_token(g, b) + " " +
                 kGenericTokens[rng.uniform_int(std::size(kGenericTokens))];
    if (rng.bernoulli(c.oov_rate)) {
      item.title += " zq" + std::to_string(rng.uniform_int(1000));
    }
    items.push_back(std::move(item));
    uses.push_back(0);
    corpus.item_cluster.push_back(g);
    return items.size() - 1;
  };

  auto pick_item = [&](std::size_t g, const std::vector<std::size_t>& taken) {
    auto& pool = reusable[g];
    if (!pool.empty() && rng.bernoulli(c.reuse_rate)) {
      const std::size_t idx = pool[rng.uniform_int(pool.size())];
      if (std::find(taken.begin(), taken.end(), idx) == taken.end()) return idx;
    }
    return fresh_item(g);
  };

  const auto positives = static_cast<std::size_t>(
      std::llround(c.positive_fraction * static_cast<double>(c.outfits)));
  std::vector<int> labels(c.outfits, 0);
  for (std::size_t i = 0; i < positives; ++i) labels[i] = 1;
  rng.shuffle(std::span<int>(labels));

  for (std::size_t o = 0; o < c.outfits; ++o) {
    std::vector<std::size_t> clusters(c.outfit_len);
    if (labels[o] == 1) {
      const std::size_t g = rng.uniform_int(c.clusters);
      std::fill(clusters.begin(), clusters.end(), g);
    } else {
      bool all_same = true;
      while (all_same) {
        for (std::size_t& g : clusters) g = rng.uniform_int(c.clusters);
        all_same = std::all_of(clusters.begin(), clusters.end(),
                               [&](std::size_t g) { return g == clusters[0]; });
      }
    }
    std::vector<std::size_t> chosen;
    for (std::size_t g : clusters) chosen.push_back(pick_item(g, chosen));

    RawOutfit outfit;
    outfit.outfit_id = padded("o", o, 6);
    for (std::size_t idx : chosen) {
      outfit.items.push_back(items[idx]);
      if (++uses[idx] == 1) reusable[corpus.item_cluster[idx]].push_back(idx);
      if (uses[idx] == c.max_item_reuse) {
        auto& pool = reusable[corpus.item_cluster[idx]];
        pool.erase(std::find(pool.begin(), pool.end(), idx));
      }
    }
    corpus.outfits.push_back(std::move(outfit));
  }

  // Distinct like counts: every negative ranks below every positive, so the
  // percentile bands only ever keep planted labels.
  std::vector<std::size_t> neg_rank, pos_rank;
  for (std::size_t o = 0; o < c.outfits; ++o) {
    (labels[o] == 1 ? pos_rank : neg_rank).push_back(o);
  }
  likes_rng.shuffle(std::span<std::size_t>(neg_rank));
  likes_rng.shuffle(std::span<std::size_t>(pos_rank));
  std::int64_t likes = 0;
  for (std::size_t o : neg_rank) corpus.outfits[o].likes = likes++;
  for (std::size_t o : pos_rank) corpus.outfits[o].likes = likes++;
  corpus.planted_labels = std::move(labels);
  return corpus;
}

SynthFiles write_synthetic(const SynthCorpus& corpus,
                           const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SynthFiles files{out_dir / "raw.jsonl", out_dir / "wordvec.txt"};
  {
    std::ofstream out(files.raw, std::ios::binary);
    if (!out) throw DataError("cannot write " + files.raw.string());
    for (const RawOutfit& outfit : corpus.outfits) {
      nlohmann::ordered_json j;
      j["outfit_id"] = outfit.outfit_id;
      j["likes"] = outfit.likes;
      j["items"] = nlohmann::ordered_json::array();
      for (const RawItem& item : outfit.items) {
        std::vector<double> feature;
        for (float v : item.image_feature) feature.push_back(round4(v));
        j["items"].push_back({{"item_id", item.item_id},
                              {"title", item.title},
                              {"category", item.category},
                              {"image_feature", feature}});
      }
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(files.wordvec, std::ios::binary);
    if (!out) throw DataError("cannot write " + files.wordvec.string());
    for (const std::string& line : corpus.wordvec_lines) out << line << '\n';
  }
  return files;
}

}  // namespace setscore
