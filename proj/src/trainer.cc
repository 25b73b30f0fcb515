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


#include "setscore/trainer.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "setscore/adam.h"
#include "setscore/checkpoint.h"
#include "setscore/compose.h"
#include "setscore/errors.h"

namespace setscore {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RankingMetrics dev_metrics(const ModelConfig& config, const ModelParams& params,
                           Objective objective,
                           std::span<const LabeledOutfit> dev) {
  if (dev.empty()) return {kNaN, kNaN};
  auto scored = score_outfits(model_scorer(config, params, objective), dev);
  try {
    return ranking_metrics(scored);
  } catch (const DataError&) {
    return {kNaN, kNaN};  // single-class dev split
  }
}

void write_row(std::ostream& out, const TrainLogRow& row) {
  out << row.iter << ',' << std::setprecision(10) << row.lr << ','
      << row.train_loss << ',' << row.dev_auc << ',' << row.dev_ap << ','
      << std::setprecision(1) << std::fixed << row.wall_ms << '\n'
      << std::defaultfloat;
  out.flush();
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (halve_every == 0) throw ConfigError("halve_every must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (eval_every == 0) throw ConfigError("eval_every must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0,1)");
  }
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(siamese.margin > 0.0)) throw ConfigError("siamese margin must be positive");
  if (item_level && objective == Objective::kSiamese) {
    throw ConfigError("item-level training needs the classification objective");
  }
}

double lr_at(std::uint64_t iter, const TrainConfig& config) {
  const std::uint64_t halvings = iter / config.halve_every;
  if (halvings > 2000) return 0.0;
  return std::ldexp(config.lr, -static_cast<int>(halvings));
}

BatchIterator::BatchIterator(std::size_t n, std::size_t batch_size, Rng rng)
    : batch_size_(batch_size), rng_(rng), order_(n) {
  if (n == 0) throw ContractViolation("BatchIterator: empty split");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  std::iota(order_.begin(), order_.end(), 0);
  reshuffle();
}

void BatchIterator::reshuffle() {
  std::iota(order_.begin(), order_.end(), 0);
  rng_.shuffle(std::span<std::size_t>(order_));
  pos_ = 0;
}

std::vector<std::size_t> BatchIterator::next() {
  if (pos_ == order_.size()) {
    ++epoch_;
    reshuffle();
  }
  const std::size_t end = std::min(order_.size(), pos_ + batch_size_);
  std::vector<std::size_t> batch(order_.begin() + pos_, order_.begin() + end);
  pos_ = end;
  return batch;
}

ModelConfig config_for(const PreparedMeta& meta, ModelConfig base) {
  base.image_dim = meta.image_dim;
  base.title_dim = meta.title_dim;
  base.category_count = meta.categories.size();
  base.outfit_len = meta.outfit_len;
  return base;
}

std::vector<LabeledOutfit> explode_items(std::span<const LabeledOutfit> outfits) {
  std::vector<LabeledOutfit> out;
  for (const LabeledOutfit& outfit : outfits) {
    for (const Item& item : outfit.items) {
      out.push_back({outfit.outfit_id + "/" + item.item_id, outfit.label, {item}});
    }
  }
  return out;
}

TrainResult train(const ModelConfig& model_config, const TrainConfig& config,
                  const PreparedDataset& data, const fs::path& out_dir,
                  const GradientHook& hook) {
  config.validate();
  ModelConfig mc = model_config;
  if (config.item_level) mc.outfit_len = 1;
  mc.validate();

  std::vector<LabeledOutfit> exploded_train, exploded_dev;
  std::span<const LabeledOutfit> train_set = data.train;
  std::span<const LabeledOutfit> dev_set = data.dev;
  if (config.item_level) {
    exploded_train = explode_items(data.train);
    exploded_dev = explode_items(data.dev);
    train_set = exploded_train;
    dev_set = exploded_dev;
  }
  if (train_set.empty()) throw DataError("train: the train split is empty");

  const Rng base(config.seed);
  Rng init_rng = base.derive(1);
  Rng dropout_rng = base.derive(3);
  TrainResult result;
  result.best_dev_auc = kNaN;
  ModelParams params = init_params(mc, init_rng);
  BatchIterator batches(train_set.size(), config.batch_size, base.derive(2));

  fs::create_directories(out_dir);
  std::ofstream log(out_dir / "log.csv", std::ios::binary);
  if (!log) throw DataError("cannot write " + (out_dir / "log.csv").string());
  log << "iter,lr,train_loss,dev_auc,dev_ap,wall_ms\n";
  save_checkpoint(params, mc, out_dir / "best");

  const AdamHyper hyper_base{config.lr, config.beta1, config.beta2, config.eps};
  const auto start = std::chrono::steady_clock::now();
  double window_loss = 0.0;
  std::size_t window_steps = 0;
  std::vector<const LabeledOutfit*> batch;

  for (std::uint64_t iter = 0; iter < config.total_iters; ++iter) {
    batch.clear();
    for (std::size_t idx : batches.next()) batch.push_back(&train_set[idx]);
    params.zero_grads();
    const double loss =
        config.objective == Objective::kClassification
            ? outfit_loss(batch, mc, params, dropout_rng)
            : siamese_batch_loss(batch, mc, params, config.siamese,
                                 dropout_rng);
    if (!std::isfinite(loss)) {
      throw NumericError("train: non-finite loss at iteration " +
                         std::to_string(iter) + "; best checkpoint kept in " +
                         (out_dir / "best").string());
    }
    if (hook) hook(params);

    AdamHyper hyper = hyper_base;
    hyper.lr = lr_at(iter, config);
    auto named = params.named();
    for (std::size_t i = 0; i < named.size(); ++i) {
      adam_step(*named[i].tensor, params.adam[i], hyper);
    }
    if (!params.all_finite()) {
      throw NumericError("train: non-finite parameters after iteration " +
                         std::to_string(iter) + "; best checkpoint kept in " +
                         (out_dir / "best").string());
    }
    window_loss += loss;
    ++window_steps;

    const std::uint64_t done = iter + 1;
    if (done % config.eval_every != 0 && done != config.total_iters) continue;
    const RankingMetrics m = dev_metrics(mc, params, config.objective, dev_set);
    TrainLogRow row;
    row.iter = done;
    row.lr = lr_at(done, config);
    row.train_loss = window_loss / static_cast<double>(window_steps);
    row.dev_auc = m.auc;
    row.dev_ap = m.ap;
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    write_row(log, row);
    result.log.push_back(row);
    window_loss = 0.0;
    window_steps = 0;
    if (std::isfinite(m.auc) &&
        (std::isnan(result.best_dev_auc) || m.auc > result.best_dev_auc)) {
      result.best_dev_auc = m.auc;
      result.best_iter = done;
      save_checkpoint(params, mc, out_dir / "best");
    }
  }
  save_checkpoint(params, mc, out_dir / "final");
  result.final_params = std::move(params);
  return result;
}

}  // namespace setscore
