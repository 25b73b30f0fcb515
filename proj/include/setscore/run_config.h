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


// JSON run configuration: {"model": {...}, "train": {...}, "pipeline": {...}}.
// Every key is optional; unknown keys are rejected.

#ifndef SETSCORE_RUN_CONFIG_H_
#define SETSCORE_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "setscore/dataset.h"
#include "setscore/model.h"
#include "setscore/trainer.h"

namespace setscore {

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  PipelineParams pipeline;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base);
PipelineParams pipeline_from_json(const nlohmann::json& j, PipelineParams base);

// SETSCORE_SEED, if set and numeric.
std::optional<std::uint64_t> env_seed();

}  // namespace setscore

#endif  // SETSCORE_RUN_CONFIG_H_
