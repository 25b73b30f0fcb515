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


// Mini-batch training loop with Adam, step-wise learning-rate halving,
// periodic dev evaluation and best/final checkpoints.

#ifndef SETSCORE_TRAINER_H_
#define SETSCORE_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

#include "setscore/dataset.h"
#include "setscore/model.h"
#include "setscore/rng.h"

namespace setscore {

// halve_every value that keeps the learning rate constant.
inline constexpr std::uint64_t kNeverHalve =
    std::numeric_limits<std::uint64_t>::max();

struct TrainConfig {
  std::size_t batch_size = 50;
  double lr = 0.01;
  std::uint64_t total_iters = 40000;
  std::uint64_t halve_every = 15000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t eval_every = 500;
  std::uint64_t seed = 0;
  Objective objective = Objective::kClassification;
  SiameseConfig siamese;
  // Train on single-item outfits carrying their outfit's label.
  bool item_level = false;

  void validate() const;
};

// lr * 0.5^floor(iter / halve_every)
double lr_at(std::uint64_t iter, const TrainConfig& config);

// Endless stream of index batches over [0, n); every epoch is a fresh
// shuffle and its last batch may be short.
class BatchIterator {
 public:
  BatchIterator(std::size_t n, std::size_t batch_size, Rng rng);

  std::vector<std::size_t> next();
  std::uint64_t epoch() const { return epoch_; }

 private:
  void reshuffle();

  std::size_t batch_size_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  std::uint64_t epoch_ = 0;
};

struct TrainLogRow {
  std::uint64_t iter = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double dev_auc = 0.0;  // NaN when the dev split cannot be ranked
  double dev_ap = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  ModelParams final_params;
  std::vector<TrainLogRow> log;
  double best_dev_auc = 0.0;  // NaN if never evaluated
  std::uint64_t best_iter = 0;
};

// Copies the dataset-derived dimensions into `base`.
ModelConfig config_for(const PreparedMeta& meta, ModelConfig base);

// Each item becomes a one-item outfit labeled like its parent.
std::vector<LabeledOutfit> explode_items(std::span<const LabeledOutfit> outfits);

// Hook run after every backward pass, before the optimizer step.
using GradientHook = std::function<void(ModelParams&)>;

// Writes out_dir/log.csv, out_dir/best and out_dir/final. Throws
// NumericError on a non-finite loss; checkpoints already on disk are kept.
TrainResult train(const ModelConfig& model_config, const TrainConfig& config,
                  const PreparedDataset& data,
                  const std::filesystem::path& out_dir,
                  const GradientHook& hook = {});

}  // namespace setscore

#endif  // SETSCORE_TRAINER_H_
