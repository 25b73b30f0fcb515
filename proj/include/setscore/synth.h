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


// Planted-rule synthetic corpus in the raw input format. Items belong to
// latent style clusters; an outfit is positive iff all of its items share a
// cluster, so no single item reveals the label.

#ifndef SETSCORE_SYNTH_H_
#define SETSCORE_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "setscore/dataset.h"

namespace setscore {

struct SynthConfig {
  std::size_t outfits = 5000;
  std::size_t clusters = 8;
  double noise = 0.3;
  std::uint64_t seed = 1;
  std::size_t image_dim = 16;
  std::size_t title_dim = 16;
  std::size_t outfit_len = 4;
  double positive_fraction = 0.2;
  std::size_t categories_per_cluster = 2;
  double stray_category_rate = 0.1;  // category drawn from any cluster
  double reuse_rate = 0.05;          // item slot filled by an earlier item
  std::size_t max_item_reuse = 3;
  std::size_t tokens_per_cluster = 4;
  double oov_rate = 0.2;             // titles carrying an unknown token

  void validate() const;
};

struct SynthCorpus {
  std::vector<RawOutfit> outfits;
  std::vector<int> planted_labels;       // aligned with outfits
  std::vector<std::size_t> item_cluster; // by item ordinal
  // Word-vector file lines, "token v1 ... vD".
  std::vector<std::string> wordvec_lines;
};

SynthCorpus generate_synthetic(const SynthConfig& config);

struct SynthFiles {
  std::filesystem::path raw;
  std::filesystem::path wordvec;
};

// Writes raw.jsonl and wordvec.txt into out_dir.
SynthFiles write_synthetic(const SynthCorpus& corpus,
                           const std::filesystem::path& out_dir);

}  // namespace setscore

#endif  // SETSCORE_SYNTH_H_
