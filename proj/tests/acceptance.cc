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


// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// Usage: acceptance <work_dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "setscore/checkpoint.h"
#include "setscore/compose.h"
#include "setscore/dataset.h"
#include "setscore/digest.h"
#include "setscore/errors.h"
#include "setscore/metrics.h"
#include "setscore/model.h"
#include "setscore/model_gradcheck.h"
#include "setscore/rng.h"
#include "setscore/synth.h"
#include "setscore/trainer.h"

namespace fs = std::filesystem;
using namespace setscore;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << n << ": " << detail
            << std::endl;
}

void info(const std::string& text) {
  std::cout << "INFO " << text << std::endl;
}

// Runs one criterion, turning an exception into a FAIL line.
template <typename Fn>
void criterion(int n, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(n, false, std::string("exception: ") + e.what());
  }
}

// --- 1 ---

void gradient_suite() {
  const auto start = Clock::now();
  GradcheckOptions opts;
  opts.eps = 1e-5;
  opts.seed = 7;
  double worst = 0.0;
  std::string worst_label;
  std::size_t failed = 0, cases = 0;
  for (const ModelGradcheckCase& c : default_gradcheck_cases()) {
    ++cases;
    GradcheckReport r = gradcheck_model(c, opts);
    if (!(r.max_rel_error < 1e-4)) ++failed;
    if (r.max_rel_error > worst || worst_label.empty()) {
      worst = r.max_rel_error;
      worst_label = c.label() + " " + r.worst_param;
    }
  }
  const ModelGradcheckCase probe = default_gradcheck_cases().front();
  const double fault_err = gradcheck_model(probe, opts, true).max_rel_error;
  const bool detected = fault_err >= 1e-4;
  const double elapsed = seconds_since(start);
  report(1, failed == 0 && detected && elapsed < 60.0,
         std::to_string(cases) + " cases, " + std::to_string(failed) +
             " over 1e-4, worst " + sci(worst) + " (" + worst_label +
             "), fault error " + fmt(fault_err) + ", " + fmt(elapsed, 2) +
             " s (< 60)");
}

// --- 2 ---

Item random_item(Rng& rng, const ModelConfig& c, std::size_t k) {
  Item it;
  it.item_id = "p" + std::to_string(k);
  it.category_id = rng.uniform_int(c.category_count);
  for (std::size_t i = 0; i < c.image_dim; ++i) it.image.push_back(rng.normal());
  for (std::size_t i = 0; i < c.title_dim; ++i) it.title_vector.push_back(rng.normal());
  return it;
}

void permutation_invariance() {
  Rng rng(2);
  const auto subsets = ModalitySet::every_subset();
  double worst = 0.0;
  std::size_t triples = 0, rnn_sensitive = 0;
  auto one = [&](Pooling pooling) {
    ModelConfig c;
    c.embed_dim = 2 + rng.uniform_int(7);
    c.modalities = subsets[rng.uniform_int(subsets.size())];
    c.pooling = pooling;
    c.image_dim = 1 + rng.uniform_int(6);
    c.title_dim = 1 + rng.uniform_int(6);
    c.category_count = 1 + rng.uniform_int(5);
    c.category_embed_dim = 1 + rng.uniform_int(8);
    c.outfit_len = 2 + rng.uniform_int(5);
    Rng init = rng.split();
    ModelParams p = init_params(c, init);
    std::vector<Item> items;
    for (std::size_t k = 0; k < c.outfit_len; ++k) items.push_back(random_item(rng, c, k));
    std::vector<const Item*> a, b;
    for (const Item& it : items) a.push_back(&it);
    b = a;
    do {
      rng.shuffle(std::span<const Item*>(b));
    } while (b == a);
    return std::abs(score_outfit(a, c, p).probability -
                    score_outfit(b, c, p).probability);
  };
  for (int t = 0; t < 1000; ++t) {
    worst = std::max(worst, one(t % 2 ? Pooling::kMax : Pooling::kMean));
    ++triples;
  }
  for (int t = 0; t < 50; ++t) rnn_sensitive += one(Pooling::kRnn) > 1e-12;
  report(2, worst <= 1e-12 && rnn_sensitive > 0,
         std::to_string(triples) + " mean/max triples, max |diff| " +
             sci(worst) + " (<= 1e-12); rnn order-sensitive in " +
             std::to_string(rnn_sensitive) + "/50");
}

// --- 3 ---

void metric_oracles() {
  Rng rng(3);
  std::size_t mismatches = 0, tie_heavy = 0;
  for (int t = 0; t < 500; ++t) {
    const bool ties = t % 2 == 0;
    tie_heavy += ties;
    auto s = oracle::random_instance(rng, 200, ties);
    if (auc(s) != oracle::pair_count_auc(s)) ++mismatches;
    if (average_precision(s) != oracle::rank_walk_ap(s)) ++mismatches;
  }
  const std::vector<Scored> worked = {{0.9, 1}, {0.8, 0}, {0.3, 1}};
  const double a = auc(worked), ap = average_precision(worked);
  const bool worked_ok = a == 0.5 && std::abs(ap - 5.0 / 6.0) < 1e-15;
  report(3, mismatches == 0 && worked_ok,
         "500 instances (" + std::to_string(tie_heavy) + " tie-heavy), " +
             std::to_string(mismatches) + " mismatches; worked example AUC " +
             fmt(a) + " AP " + fmt(ap, 6));
}

// --- 4 ---

struct Corpus {
  fs::path data_dir;
  double synth_prepare_seconds = 0.0;
};

Corpus pipeline_invariants(const fs::path& work) {
  const auto start = Clock::now();
  SynthConfig sc;  // 5000 outfits, 8 clusters, noise 0.3, seed 1
  SynthFiles files = write_synthetic(generate_synthetic(sc), work / "raw");
  PipelineParams pp;
  pp.seed = 7;
  PrepareSummary s = prepare(files.raw, files.wordvec, work / "data", pp);
  const double elapsed = seconds_since(start);
  prepare(files.raw, files.wordvec, work / "data_rerun", pp);

  const PreparedDataset data = load_prepared(work / "data");
  std::map<std::string, int> owner;
  std::size_t overlap = 0;
  for (Split sp : {Split::kTrain, Split::kDev, Split::kTest}) {
    std::set<std::string> seen;
    for (const LabeledOutfit& o : data.split(sp)) {
      for (const Item& it : o.items) seen.insert(it.item_id);
    }
    for (const std::string& id : seen) {
      if (!owner.emplace(id, static_cast<int>(sp)).second) ++overlap;
    }
  }
  const double ratio = static_cast<double>(s.total.outfits - s.total.positives) /
                       static_cast<double>(s.total.positives);
  const bool same = directory_digest(work / "data") ==
                    directory_digest(work / "data_rerun");
  info("prepared outfits train/dev/test " + std::to_string(s.train.outfits) +
       "/" + std::to_string(s.dev.outfits) + "/" + std::to_string(s.test.outfits) +
       ", positives " + std::to_string(s.total.positives) + ", categories " +
       std::to_string(data.meta.categories.size()));
  report(4, overlap == 0 && std::abs(ratio - 4.0) <= 0.5 && same,
         "cross-split overlap " + std::to_string(overlap) + ", neg:pos " +
             fmt(ratio, 3) + " (4 +- 0.5), rerun " +
             (same ? "byte-identical" : "DIFFERS"));
  return {work / "data", elapsed};
}

// --- training helpers ---

struct Trained {
  ModelConfig config;
  ModelParams params;        // best checkpoint, as loaded
  ModelParams final_params;  // in memory after the last step, never saved
  double best_dev_auc = 0.0;
  double seconds = 0.0;
};

Trained train_run(const PreparedDataset& data, const fs::path& dir,
                  ModalitySet modalities, Pooling pooling, bool item_level) {
  ModelConfig mc;
  mc.embed_dim = 8;
  mc.modalities = modalities;
  mc.pooling = pooling;
  mc = config_for(data.meta, mc);
  TrainConfig tc;
  tc.total_iters = 5000;
  tc.eval_every = 500;
  tc.item_level = item_level;
  const auto start = Clock::now();
  TrainResult r = train(mc, tc, data, dir);
  Trained t;
  t.seconds = seconds_since(start);
  Checkpoint best = load_checkpoint(dir / "best");
  t.config = best.config;
  t.params = std::move(best.params);
  t.best_dev_auc = r.best_dev_auc;
  t.final_params = std::move(r.final_params);
  return t;
}

double test_auc(const Trained& t, const PreparedDataset& data) {
  return auc(score_outfits(
      model_scorer(t.config, t.params, Objective::kClassification), data.test));
}

// Accuracy over the auto evaluation set of the test split.
double composition_accuracy(const Trained& t, const PreparedDataset& data,
                            std::size_t* tuple_count = nullptr) {
  const std::vector<Item> db_items = data.items_of(Split::kTest);
  std::vector<const Item*> db;
  for (const Item& it : db_items) db.push_back(&it);
  Rng rng(7);
  auto tuples = build_auto_evalset(data.test, db, rng);
  if (tuple_count) *tuple_count = tuples.size();
  return constrained_accuracy(
             model_scorer(t.config, t.params, Objective::kClassification),
             tuples, data.item_index())
      .accuracy;
}

// --- 8 ---

void greedy_vs_exhaustive() {
  Rng rng(8);
  std::size_t over = 0, single_mismatch = 0;
  double gap_sum = 0.0, gap_max = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<Item> seed_items, cand_items;
    for (int i = 0; i < 2; ++i) {
      Item it;
      it.item_id = "s" + std::to_string(i);
      seed_items.push_back(it);
    }
    for (int i = 0; i < 8; ++i) {
      Item it;
      it.item_id = "c" + std::to_string(i);
      cand_items.push_back(it);
    }
    std::vector<const Item*> seed, cands;
    for (const Item& it : seed_items) seed.push_back(&it);
    for (const Item& it : cand_items) cands.push_back(&it);
    const OutfitScorer f = oracle::RandomSetScorer(rng.next_u64());
    const double greedy = f(compose(f, cands, seed, 4).outfit);
    const double best = oracle::exhaustive_best(f, cands, seed, 2);
    if (greedy > best) ++over;
    gap_sum += best - greedy;
    gap_max = std::max(gap_max, best - greedy);
    const double one = f(compose(f, cands, seed, 3).outfit);
    if (one != oracle::exhaustive_best(f, cands, seed, 1)) ++single_mismatch;
  }
  report(8, over == 0 && single_mismatch == 0,
         "200 scorers: greedy above optimum " + std::to_string(over) +
             ", single-step mismatches " + std::to_string(single_mismatch) +
             ", mean gap " + fmt(gap_sum / 200.0) + ", max gap " + fmt(gap_max));
}

// --- 9 ---

void persistence(const Trained& t, const PreparedDataset& data,
                 const fs::path& work) {
  const fs::path a = work / "persist_a", b = work / "persist_b";
  std::vector<double> before;
  auto f = model_scorer(t.config, t.final_params, Objective::kClassification);
  for (const Scored& s : score_outfits(f, data.test)) before.push_back(s.score);
  save_checkpoint(t.final_params, t.config, a);
  Checkpoint loaded = load_checkpoint(a);
  save_checkpoint(loaded.params, loaded.config, b);
  const bool stable = directory_digest(a) == directory_digest(b);

  auto g = model_scorer(loaded.config, loaded.params, Objective::kClassification);
  double worst = 0.0;
  auto after = score_outfits(g, data.test);
  for (std::size_t i = 0; i < after.size(); ++i) {
    worst = std::max(worst, std::abs(after[i].score - before[i]));
  }

  const fs::path victim = b / "fusion.w1.f32";
  std::string bytes = read_file_bytes(victim);
  bytes[bytes.size() / 2] ^= 0x01;
  write_file_bytes(victim, bytes);
  bool rejected = false;
  try {
    load_checkpoint(b);
  } catch (const DataError&) {
    rejected = true;
  }
  report(9, stable && worst <= 1e-5 && rejected,
         std::string("save-load-save ") + (stable ? "byte-identical" : "DIFFERS") +
             ", max score drift " + sci(worst) +
             " (<= 1e-5), corrupted tensor " + (rejected ? "rejected" : "ACCEPTED"));
}

// --- 10 ---

void schedule_and_loss(const PreparedDataset& data) {
  TrainConfig tc;
  const double l0 = lr_at(0, tc), l1 = lr_at(15000, tc), l2 = lr_at(30000, tc);
  const bool lr_ok = l0 == 0.01 && l1 == 0.005 && l2 == 0.0025;

  ModelConfig mc = config_for(data.meta, ModelConfig{});
  Rng init(1);
  ModelParams p = init_params(mc, init);
  std::fill(p.classifier_weight.values().begin(), p.classifier_weight.values().end(), 0.0);
  std::fill(p.classifier_bias.values().begin(), p.classifier_bias.values().end(), 0.0);
  // One outfit per batch, so the mean is the per-outfit loss itself.
  Rng unused(0);
  std::size_t exact = 0, seen_labels = 0;
  for (const LabeledOutfit& o : data.dev) {
    const LabeledOutfit* one = &o;
    const double loss = outfit_loss(std::span(&one, 1), mc, p, unused,
                                    Mode::kInfer, false);
    exact += loss == std::log(2.0);
    seen_labels |= 1u << o.label;
  }
  const bool loss_ok = exact == data.dev.size() && seen_labels == 3;
  report(10, lr_ok && loss_ok,
         "lr_at(0/15000/30000) = " + fmt(l0, 6) + "/" + fmt(l1, 6) + "/" +
             fmt(l2, 6) + "; zero-logit loss == ln 2 exactly for " +
             std::to_string(exact) + "/" + std::to_string(data.dev.size()) +
             " dev outfits of both labels");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <work_dir>\n";
    return 2;
  }
  const fs::path work = argv[1];
  fs::remove_all(work);
  fs::create_directories(work);

  criterion(1, gradient_suite);
  criterion(2, permutation_invariance);
  criterion(3, metric_oracles);

  Corpus corpus;
  criterion(4, [&] { corpus = pipeline_invariants(work); });
  if (corpus.data_dir.empty()) {
    for (int n = 5; n <= 7; ++n) report(n, false, "no prepared corpus");
    criterion(8, greedy_vs_exhaustive);
    for (int n = 9; n <= 10; ++n) report(n, false, "no prepared corpus");
    return 1;
  }
  const PreparedDataset data = load_prepared(corpus.data_dir);
  const ModalitySet image_category = ModalitySet::parse("image,category");

  // 5: the specified mean-pooled model, plus max pooling for reference.
  Trained mean_model, max_model;
  criterion(5, [&] {
    mean_model = train_run(data, work / "run_ic_mean", image_category,
                           Pooling::kMean, false);
    const double total = corpus.synth_prepare_seconds + mean_model.seconds;
    report(5, mean_model.best_dev_auc >= 0.95 && total < 300.0,
           "image+category mean pooling d=8, 5000 iters: best dev AUC " +
               fmt(mean_model.best_dev_auc) + " (>= 0.95), " + fmt(total, 1) +
               " s (< 300)");
    max_model = train_run(data, work / "run_ic_max", image_category,
                          Pooling::kMax, false);
    info("image+category max pooling, same settings: best dev AUC " +
         fmt(max_model.best_dev_auc) + ", " + fmt(max_model.seconds, 1) + " s");
  });

  // 6: full model with pooling chosen on dev vs item-level late fusion.
  criterion(6, [&] {
    double best_dev = -1.0, full_test = 0.0;
    std::string chosen;
    for (Pooling pooling : {Pooling::kMean, Pooling::kMax, Pooling::kRnn}) {
      Trained t = train_run(data, work / (std::string("run_full_") + pooling_name(pooling)),
                            ModalitySet::all(), pooling, false);
      const double test = test_auc(t, data);
      info(std::string("full model, ") + pooling_name(pooling) +
           " pooling: best dev AUC " + fmt(t.best_dev_auc) + ", test AUC " +
           fmt(test));
      if (t.best_dev_auc > best_dev) {
        best_dev = t.best_dev_auc;
        full_test = test;
        chosen = pooling_name(pooling);
      }
    }
    Trained item = train_run(data, work / "run_item_level", ModalitySet::all(),
                             Pooling::kMean, true);
    ItemScorer item_scorer = [&item](const Item& it) {
      const Item* ref = &it;
      return quality_score(ItemRefs(&ref, 1), item.config, item.params,
                           Objective::kClassification);
    };
    const double late =
        auc(late_fusion_scores(item_scorer, data.test, Aggregate::kMean));
    report(6, late <= full_test - 0.10,
           "late-fusion mean test AUC " + fmt(late) + " vs full model (" +
               chosen + " pooling) " + fmt(full_test) + ", gap " +
               fmt(full_test - late) + " (>= 0.10)");
  });

  // 7: constrained composition with the model of 5, plus a random control.
  criterion(7, [&] {
    if (mean_model.params.named().empty()) throw Error("criterion 5 model missing");
    std::size_t tuples = 0;
    const double acc = composition_accuracy(mean_model, data, &tuples);
    const double max_acc = composition_accuracy(max_model, data);

    const std::vector<Item> db_items = data.items_of(Split::kTest);
    std::vector<const Item*> db;
    for (const Item& it : db_items) db.push_back(&it);
    std::vector<EvalTuple> control;
    Rng build(70);
    while (control.size() < 10000) {
      for (EvalTuple& t : build_auto_evalset(data.test, db, build)) {
        if (control.size() < 10000) control.push_back(std::move(t));
      }
    }
    Rng noise(71);
    const OutfitScorer random_scorer = [&noise](ItemRefs) { return noise.uniform(); };
    const double random_acc =
        constrained_accuracy(random_scorer, control, data.item_index()).accuracy;
    info("constrained accuracy with the max-pooled model: " + fmt(max_acc));
    report(7, acc >= 0.8 && std::abs(random_acc - 0.2) <= 0.02,
           "model of criterion 5 accuracy " + fmt(acc) + " over " +
               std::to_string(tuples) + " tuples (>= 0.8); random control " +
               fmt(random_acc) + " over 10000 tuples (0.2 +- 0.02)");
  });

  criterion(8, greedy_vs_exhaustive);
  criterion(9, [&] {
    if (max_model.final_params.named().empty()) throw Error("trained model missing");
    persistence(max_model, data, work);
  });
  criterion(10, [&] { schedule_and_loss(data); });

  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
