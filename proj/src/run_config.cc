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


#include "setscore/run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "setscore/checkpoint.h"
#include "setscore/errors.h"

namespace setscore {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const char* section) {
  if (!j.is_object()) {
    throw ConfigError(std::string("config section '") + section +
                      "' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError(std::string("unknown key '") + key + "' in section '" +
                        section + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  reject_unknown(j,
                 {"batch_size", "lr", "total_iters", "halve_every", "beta1",
                  "beta2", "eps", "eval_every", "seed", "objective", "margin",
                  "item_level"},
                 "train");
  read(j, "batch_size", c.batch_size);
  read(j, "lr", c.lr);
  read(j, "total_iters", c.total_iters);
  if (auto it = j.find("halve_every"); it != j.end()) {
    if (it->is_null() || (it->is_string() && *it == "never")) {
      c.halve_every = kNeverHalve;
    } else {
      read(j, "halve_every", c.halve_every);
    }
  }
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "eps", c.eps);
  read(j, "eval_every", c.eval_every);
  read(j, "seed", c.seed);
  if (j.contains("objective")) {
    std::string name;
    read(j, "objective", name);
    c.objective = parse_objective(name);
  }
  read(j, "margin", c.siamese.margin);
  read(j, "item_level", c.item_level);
  return c;
}

PipelineParams pipeline_from_json(const json& j, PipelineParams p) {
  reject_unknown(j,
                 {"min_category_items", "max_item_outfits", "outfit_len",
                  "max_combos", "fractions", "seed"},
                 "pipeline");
  read(j, "min_category_items", p.min_category_items);
  read(j, "max_item_outfits", p.max_item_outfits);
  read(j, "outfit_len", p.outfit_len);
  read(j, "max_combos", p.max_combos);
  if (j.contains("fractions")) {
    std::vector<double> f;
    read(j, "fractions", f);
    if (f.size() != 3) throw ConfigError("fractions must list train, dev, test");
    p.fractions = {f[0], f[1], f[2]};
  }
  read(j, "seed", p.seed);
  return p;
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, {"model", "train", "pipeline"}, "top level");
  RunConfig rc;
  if (j.contains("model")) rc.model = config_from_json(j["model"], rc.model);
  if (j.contains("train")) rc.train = train_config_from_json(j["train"], rc.train);
  if (j.contains("pipeline")) {
    rc.pipeline = pipeline_from_json(j["pipeline"], rc.pipeline);
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv("SETSCORE_SEED");
  if (value == nullptr || *value == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  const std::string_view text(value);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("SETSCORE_SEED is not an unsigned integer: " +
                      std::string(text));
  }
  return seed;
}

}  // namespace setscore
