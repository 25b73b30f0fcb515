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


// setscore: prepare, train, eval, build-evalset, compose, importance,
// gradcheck, synth.
//
// Exit codes: 0 success, 1 runtime or data failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "setscore/checkpoint.h"
#include "setscore/compose.h"
#include "setscore/dataset.h"
#include "setscore/digest.h"
#include "setscore/errors.h"
#include "setscore/model_gradcheck.h"
#include "setscore/run_config.h"
#include "setscore/synth.h"
#include "setscore/trainer.h"

namespace fs = std::filesystem;
using namespace setscore;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Raw config file plus the parsed result, so callers can tell which keys the
// file actually set.
struct LoadedConfig {
  json raw = json::object();
  RunConfig run;

  bool sets(const char* section, const char* key) const {
    return raw.contains(section) && raw[section].contains(key);
  }
};

LoadedConfig load_config(const std::string& path) {
  LoadedConfig lc;
  if (path.empty()) return lc;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    lc.raw = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  lc.run = run_config_from_json(lc.raw);
  return lc;
}

// flag > config file > SETSCORE_SEED > 0
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           const LoadedConfig& lc, const char* section,
                           std::uint64_t from_file) {
  if (flag) return *flag;
  if (lc.sets(section, "seed")) return from_file;
  return env_seed().value_or(0);
}

Split split_flag(const std::string& name) {
  try {
    return parse_split(name);
  } catch (const Error&) {
    throw ConfigError("unknown split '" + name + "' (train|dev|test)");
  }
}

std::vector<const Item*> pointers(const std::vector<Item>& items) {
  std::vector<const Item*> out;
  for (const Item& item : items) out.push_back(&item);
  return out;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

const Item* lookup(const ItemIndex& index, const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) throw DataError("unknown item id '" + id + "'");
  return it->second;
}

void print_counts(const char* name, const SplitCounts& c) {
  std::cout << std::left << std::setw(6) << name << " outfits=" << c.outfits
            << " items=" << c.items << " positives=" << c.positives << '\n';
}

// --- prepare ---

struct PrepareArgs {
  std::string input, wordvec, out, config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> min_category_items, max_item_outfits, outfit_len,
      max_combos;
};

int run_prepare(const PrepareArgs& a) {
  LoadedConfig lc = load_config(a.config);
  PipelineParams p = lc.run.pipeline;
  p.seed = resolve_seed(a.seed, lc, "pipeline", p.seed);
  if (a.min_category_items) p.min_category_items = *a.min_category_items;
  if (a.max_item_outfits) p.max_item_outfits = *a.max_item_outfits;
  if (a.outfit_len) p.outfit_len = *a.outfit_len;
  if (a.max_combos) p.max_combos = *a.max_combos;
  PrepareSummary s = prepare(a.input, a.wordvec, a.out, p);
  for (const std::string& w : s.warnings) std::cerr << "warning: " << w << '\n';
  print_counts("train", s.train);
  print_counts("dev", s.dev);
  print_counts("test", s.test);
  print_counts("total", s.total);
  std::cout << "thresholds p1=" << s.thresholds.p1 << " p40=" << s.thresholds.p40
            << " p90=" << s.thresholds.p90 << " p99=" << s.thresholds.p99
            << '\n'
            << "categories " << s.category_histogram.size() << '\n'
            << "seed " << p.seed << '\n';
  return 0;
}

// --- train ---

struct TrainArgs {
  std::string data, out, config;
  std::optional<std::string> modalities, pooling, objective;
  std::optional<std::size_t> embed_dim, fusion_hidden, batch_size,
      category_embed_dim;
  std::optional<double> dropout, lr, margin;
  std::optional<std::uint64_t> iters, halve_every, eval_every, seed;
  bool item_level = false;
};

int run_train(const TrainArgs& a) {
  LoadedConfig lc = load_config(a.config);
  ModelConfig mc = lc.run.model;
  TrainConfig tc = lc.run.train;
  if (a.modalities) mc.modalities = ModalitySet::parse(*a.modalities);
  if (a.pooling) mc.pooling = parse_pooling(*a.pooling);
  if (a.embed_dim) mc.embed_dim = *a.embed_dim;
  if (a.fusion_hidden) mc.fusion_hidden = *a.fusion_hidden;
  if (a.category_embed_dim) mc.category_embed_dim = *a.category_embed_dim;
  if (a.dropout) mc.dropout_rate = *a.dropout;
  if (a.objective) tc.objective = parse_objective(*a.objective);
  if (a.batch_size) tc.batch_size = *a.batch_size;
  if (a.lr) tc.lr = *a.lr;
  if (a.margin) tc.siamese.margin = *a.margin;
  if (a.iters) tc.total_iters = *a.iters;
  if (a.halve_every) tc.halve_every = *a.halve_every;
  if (a.eval_every) tc.eval_every = *a.eval_every;
  if (a.item_level) tc.item_level = true;
  tc.seed = resolve_seed(a.seed, lc, "train", tc.seed);

  PreparedDataset data = load_prepared(a.data);
  mc = config_for(data.meta, mc);
  TrainResult r = train(mc, tc, data, a.out);
  std::cout << "iterations " << tc.total_iters << '\n'
            << "best_dev_auc " << r.best_dev_auc << " at iter " << r.best_iter
            << '\n';
  if (!r.log.empty()) {
    const TrainLogRow& last = r.log.back();
    std::cout << "final_dev_auc " << last.dev_auc << " final_dev_ap "
              << last.dev_ap << '\n';
  }
  std::cout << "checkpoints " << (fs::path(a.out) / "best").string() << ' '
            << (fs::path(a.out) / "final").string() << '\n';
  return 0;
}

// --- eval ---

struct EvalArgs {
  std::string ckpt, data, split = "test", objective = "classification",
                         baseline, metrics = "metrics.csv", errors;
  std::size_t top_k = 1000;
};

int run_eval(const EvalArgs& a) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  PreparedDataset data = load_prepared(a.data);
  const Split split = split_flag(a.split);
  const auto& outfits = data.split(split);
  const Objective objective = parse_objective(a.objective);
  OutfitScorer f = model_scorer(ck.config, ck.params, objective);

  std::string method = "set";
  std::vector<Scored> scored;
  if (a.baseline.empty()) {
    scored = score_outfits(f, outfits);
  } else {
    const std::string prefix = "late-fusion:";
    if (a.baseline.rfind(prefix, 0) != 0) {
      throw ConfigError("unknown baseline '" + a.baseline +
                        "' (late-fusion:mean|max|min)");
    }
    const Aggregate agg = parse_aggregate(a.baseline.substr(prefix.size()));
    ItemScorer item_scorer = [&](const Item& item) {
      const Item* ref = &item;
      return quality_score(ItemRefs(&ref, 1), ck.config, ck.params,
                           Objective::kClassification);
    };
    scored = late_fusion_scores(item_scorer, outfits, agg);
    method = a.baseline;
  }
  const RankingMetrics m = ranking_metrics(scored);
  std::cout << "split " << a.split << " outfits " << outfits.size() << '\n'
            << "AUC " << std::setprecision(6) << m.auc << '\n'
            << "AP " << m.ap << '\n';
  {
    std::ofstream out(a.metrics, std::ios::binary);
    if (!out) throw DataError("cannot write " + a.metrics);
    out << "split,method,outfits,auc,ap\n"
        << a.split << ',' << method << ',' << outfits.size() << ','
        << std::setprecision(10) << m.auc << ',' << m.ap << '\n';
  }
  if (!a.errors.empty()) {
    TopKErrors e = top_k_errors(f, outfits, a.top_k);
    std::ofstream out(a.errors, std::ios::binary);
    if (!out) throw DataError("cannot write " + a.errors);
    for (const ErrorEntry& err : e.errors) {
      out << nlohmann::ordered_json{{"outfit_id", err.outfit_id},
                                    {"score", err.score}}
                 .dump()
          << '\n';
    }
    std::cout << "top" << e.considered << "_error_rate " << e.error_rate << '\n';
  }
  return 0;
}

// --- build-evalset ---

struct BuildEvalsetArgs {
  std::string data, out = "tuples.jsonl", split = "test";
  std::optional<std::uint64_t> seed;
};

int run_build_evalset(const BuildEvalsetArgs& a) {
  PreparedDataset data = load_prepared(a.data);
  const Split split = split_flag(a.split);
  const std::vector<Item> db = data.items_of(split);
  const auto refs = pointers(db);
  Rng rng(a.seed ? *a.seed : env_seed().value_or(0));
  auto tuples = build_auto_evalset(data.split(split), refs, rng);
  write_eval_tuples(a.out, tuples);
  std::cout << "tuples " << tuples.size() << " -> " << a.out << '\n';
  return 0;
}

// --- compose ---

struct ComposeArgs {
  std::string ckpt, data, evalset, seed_items, candidates_file, ranked,
      objective = "classification";
  std::optional<std::size_t> target_len;
};

std::vector<std::string> read_candidate_ids(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      ids.push_back(j.is_string() ? j.get<std::string>()
                                  : j.at("item_id").get<std::string>());
    } catch (const json::exception& e) {
      throw DataError(path + " line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return ids;
}

int run_compose(const ComposeArgs& a) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  PreparedDataset data = load_prepared(a.data);
  const ItemIndex index = data.item_index();
  OutfitScorer f = model_scorer(ck.config, ck.params, parse_objective(a.objective));

  if (!a.evalset.empty()) {
    auto tuples = read_eval_tuples(a.evalset);
    ConstrainedResult r = constrained_accuracy(f, tuples, index);
    std::cout << "tuples " << tuples.size() << '\n'
              << "accuracy " << std::setprecision(6) << r.accuracy << '\n';
    if (!a.ranked.empty()) {
      std::ofstream out(a.ranked, std::ios::binary);
      if (!out) throw DataError("cannot write " + a.ranked);
      for (const TupleOutcome& o : r.outcomes) {
        nlohmann::ordered_json j;
        j["chosen"] = o.chosen;
        j["hit"] = o.hit;
        j["ranked"] = nlohmann::ordered_json::array();
        for (const RankedCandidate& c : o.ranked) {
          j["ranked"].push_back({{"item_id", c.item_id}, {"score", c.score}});
        }
        out << j.dump() << '\n';
      }
    }
    return 0;
  }

  if (a.seed_items.empty() || a.candidates_file.empty()) {
    throw ConfigError(
        "compose needs --evalset, or --seed-items with --candidates-file");
  }
  std::vector<const Item*> seed, cands;
  for (const std::string& id : split_csv(a.seed_items)) {
    seed.push_back(lookup(index, id));
  }
  for (const std::string& id : read_candidate_ids(a.candidates_file)) {
    cands.push_back(lookup(index, id));
  }
  const std::size_t target = a.target_len.value_or(ck.config.outfit_len);
  Composition c = compose(f, cands, seed, target);
  nlohmann::ordered_json j;
  j["outfit"] = json::array();
  for (const Item* item : c.outfit) j["outfit"].push_back(item->item_id);
  j["rounds"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < c.picks.size(); ++r) {
    j["rounds"].push_back(
        {{"item_id", c.picks[r]->item_id}, {"score", c.round_scores[r]}});
  }
  std::cout << j.dump() << '\n';
  return 0;
}

// --- importance ---

struct ImportanceArgs {
  std::string ckpt, data, outfit_id, objective = "classification";
  std::size_t replicates = 1;
  std::optional<std::uint64_t> seed;
};

int run_importance(const ImportanceArgs& a) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  PreparedDataset data = load_prepared(a.data);
  OutfitScorer f = model_scorer(ck.config, ck.params, parse_objective(a.objective));
  for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
    for (const LabeledOutfit& outfit : data.split(s)) {
      if (outfit.outfit_id != a.outfit_id) continue;
      const std::vector<Item> db = data.items_of(s);
      const auto refs = pointers(db);
      Rng rng(a.seed ? *a.seed : env_seed().value_or(0));
      auto items = item_refs(outfit);
      auto order = item_importance(f, items, refs, rng, a.replicates);
      for (const ImportanceEntry& e : order) {
        std::cout << nlohmann::ordered_json{{"item_id", e.item_id},
                                            {"decrement", e.decrement}}
                         .dump()
                  << '\n';
      }
      return 0;
    }
  }
  throw DataError("outfit '" + a.outfit_id + "' not found in " + a.data);
}

// --- gradcheck ---

struct GradcheckArgs {
  double eps = 1e-5;
  double tolerance = 1e-4;
  std::size_t coords = 64;
  std::uint64_t seed = 7;
  bool inject_fault = false;
};

int run_gradcheck(const GradcheckArgs& a) {
  GradcheckOptions opts;
  opts.eps = a.eps;
  opts.coords_per_tensor = a.coords;
  opts.seed = a.seed;
  bool all_pass = true;
  for (const ModelGradcheckCase& c : default_gradcheck_cases()) {
    GradcheckReport r = gradcheck_model(c, opts, a.inject_fault);
    const bool pass = r.max_rel_error < a.tolerance;
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.label()
              << " max_rel_err=" << std::setprecision(3) << r.max_rel_error
              << " worst=" << r.worst_param << '[' << r.worst_index << ']'
              << " coords=" << r.coords_checked
              << " unresolved=" << r.coords_unresolved << '\n';
  }
  return all_pass ? 0 : kExitFailure;
}

// --- synth ---

int run_synth(const SynthConfig& c, const std::string& out) {
  SynthCorpus corpus = generate_synthetic(c);
  SynthFiles files = write_synthetic(corpus, out);
  std::size_t positives = 0;
  for (int y : corpus.planted_labels) positives += y;
  std::cout << "outfits " << corpus.outfits.size() << " planted_positives "
            << positives << " items " << corpus.item_cluster.size() << '\n'
            << "raw " << files.raw.string() << '\n'
            << "wordvec " << files.wordvec.string() << '\n'
            << "digest " << sha256_hex(read_file_bytes(files.raw)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outfit set scoring and composition"};
  app.require_subcommand(1);
  int status = 0;

  PrepareArgs prep;
  auto* p = app.add_subcommand("prepare", "Filter, label and split a raw corpus");
  p->add_option("--input", prep.input, "Raw outfits (JSON Lines)")->required();
  p->add_option("--wordvec", prep.wordvec, "Word-vector text file")->required();
  p->add_option("--out", prep.out, "Output directory")->required();
  p->add_option("--config", prep.config, "JSON run config");
  p->add_option("--seed", prep.seed, "Pipeline seed");
  p->add_option("--min-category-items", prep.min_category_items,
                "Drop categories with fewer items (default 500)");
  p->add_option("--max-item-outfits", prep.max_item_outfits,
                "Drop items in more outfits (default 5)");
  p->add_option("--outfit-len", prep.outfit_len, "Items per outfit (default 4)");
  p->add_option("--max-combos", prep.max_combos,
                "Subsets drawn from longer outfits (default 5)");
  p->callback([&] { status = run_prepare(prep); });

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a scorer");
  t->add_option("--data", tr.data, "Prepared dataset directory")->required();
  t->add_option("--out", tr.out, "Run directory")->required();
  t->add_option("--config", tr.config, "JSON run config");
  t->add_option("--modalities", tr.modalities,
                "e.g. image,title,category or full");
  t->add_option("--pooling", tr.pooling, "mean|max|rnn");
  t->add_option("--objective", tr.objective, "classification|siamese");
  t->add_option("--embed-dim", tr.embed_dim, "Item embedding width d");
  t->add_option("--fusion-hidden", tr.fusion_hidden, "Fusion MLP hidden width");
  t->add_option("--category-embed-dim", tr.category_embed_dim,
                "Category embedding width");
  t->add_option("--dropout", tr.dropout, "Dropout rate in [0,1)");
  t->add_option("--iters", tr.iters, "Total iterations");
  t->add_option("--batch-size", tr.batch_size, "Outfits per batch");
  t->add_option("--lr", tr.lr, "Initial learning rate");
  t->add_option("--halve-every", tr.halve_every, "Iterations per lr halving");
  t->add_option("--eval-every", tr.eval_every, "Iterations per dev evaluation");
  t->add_option("--margin", tr.margin, "Contrastive margin");
  t->add_option("--seed", tr.seed, "Training seed");
  t->add_flag("--item-level", tr.item_level,
              "Train on single items for the late-fusion baseline");
  t->callback([&] { status = run_train(tr); });

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "AUC and AP on one split");
  e->add_option("--ckpt", ev.ckpt, "Checkpoint directory")->required();
  e->add_option("--data", ev.data, "Prepared dataset directory")->required();
  e->add_option("--split", ev.split, "train|dev|test")->capture_default_str();
  e->add_option("--objective", ev.objective, "classification|siamese")
      ->capture_default_str();
  e->add_option("--baseline", ev.baseline,
                "late-fusion:mean|max|min (checkpoint trained with --item-level)");
  e->add_option("--metrics", ev.metrics, "Metrics CSV path")
      ->capture_default_str();
  e->add_option("--errors", ev.errors, "Write top-K errors as JSON Lines");
  e->add_option("--top-k", ev.top_k, "K for the error listing")
      ->capture_default_str();
  e->callback([&] { status = run_eval(ev); });

  BuildEvalsetArgs be;
  auto* b = app.add_subcommand("build-evalset",
                               "Held-out-item tuples from positive outfits");
  b->add_option("--data", be.data, "Prepared dataset directory")->required();
  b->add_option("--out", be.out, "Tuples file")->capture_default_str();
  b->add_option("--split", be.split, "Source split")->capture_default_str();
  b->add_option("--seed", be.seed, "Sampling seed");
  b->callback([&] { status = run_build_evalset(be); });

  ComposeArgs co;
  auto* c = app.add_subcommand("compose", "Greedy outfit completion");
  c->add_option("--ckpt", co.ckpt, "Checkpoint directory")->required();
  c->add_option("--data", co.data, "Prepared dataset directory")->required();
  c->add_option("--evalset", co.evalset, "Tuples file; prints accuracy");
  c->add_option("--ranked", co.ranked, "Write ranked candidates per tuple");
  c->add_option("--seed-items", co.seed_items, "Comma-separated item ids");
  c->add_option("--candidates-file", co.candidates_file,
                "Candidate item ids, one JSON string or object per line");
  c->add_option("--target-len", co.target_len, "Outfit length to reach");
  c->add_option("--objective", co.objective, "classification|siamese")
      ->capture_default_str();
  c->callback([&] { status = run_compose(co); });

  ImportanceArgs im;
  auto* i = app.add_subcommand("importance", "Order an outfit's items by impact");
  i->add_option("--ckpt", im.ckpt, "Checkpoint directory")->required();
  i->add_option("--data", im.data, "Prepared dataset directory")->required();
  i->add_option("--outfit-id", im.outfit_id, "Outfit to analyse")->required();
  i->add_option("--replicates", im.replicates, "Replacements per item")
      ->capture_default_str();
  i->add_option("--seed", im.seed, "Sampling seed");
  i->add_option("--objective", im.objective, "classification|siamese")
      ->capture_default_str();
  i->callback([&] { status = run_importance(im); });

  GradcheckArgs gc;
  auto* g = app.add_subcommand("gradcheck",
                               "Finite-difference check of every model variant");
  g->add_option("--eps", gc.eps, "Perturbation")->capture_default_str();
  g->add_option("--tolerance", gc.tolerance, "Max relative error")
      ->capture_default_str();
  g->add_option("--coords", gc.coords, "Coordinates per tensor")
      ->capture_default_str();
  g->add_option("--seed", gc.seed, "Seed")->capture_default_str();
  g->add_flag("--inject-fault", gc.inject_fault,
              "Negate one gradient to prove the check can fail");
  g->callback([&] { status = run_gradcheck(gc); });

  SynthConfig sc;
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* s = app.add_subcommand("synth", "Generate a planted-rule corpus");
  s->add_option("--out", synth_out, "Output directory")->required();
  s->add_option("--outfits", sc.outfits, "Outfit count")->capture_default_str();
  s->add_option("--clusters", sc.clusters, "Style clusters")
      ->capture_default_str();
  s->add_option("--noise", sc.noise, "Feature noise stddev")
      ->capture_default_str();
  s->add_option("--seed", synth_seed, "Seed (default 1)");
  s->add_option("--image-dim", sc.image_dim, "Image feature length")
      ->capture_default_str();
  s->add_option("--title-dim", sc.title_dim, "Word-vector length")
      ->capture_default_str();
  s->add_option("--positive-fraction", sc.positive_fraction,
                "Share of planted positives")
      ->capture_default_str();
  s->callback([&] {
    if (synth_seed) {
      sc.seed = *synth_seed;
    } else if (auto env = env_seed()) {
      sc.seed = *env;
    }
    status = run_synth(sc, synth_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return status;
}
