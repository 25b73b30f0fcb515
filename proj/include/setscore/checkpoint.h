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


// Checkpoint directory: manifest.json plus one raw little-endian f32 file per
// tensor. Values are rounded to 32-bit floats on save.

#ifndef SETSCORE_CHECKPOINT_H_
#define SETSCORE_CHECKPOINT_H_

#include <filesystem>

#include "json.hpp"
#include "setscore/model.h"

namespace setscore {

inline constexpr const char* kCheckpointSchema = "ckpt.v1";

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

nlohmann::ordered_json config_to_json(const ModelConfig& config);
// Missing keys keep their defaults; unknown keys are a ConfigError.
ModelConfig config_from_json(const nlohmann::json& j,
                             ModelConfig base = ModelConfig{});

// Overwrites any previous checkpoint at `dir`. Files are written to a sibling
// temporary directory first and renamed into place.
void save_checkpoint(const ModelParams& params, const ModelConfig& config,
                     const std::filesystem::path& dir);

// Verifies schema, digests, byte lengths and shapes before returning
// anything. Adam state comes back zeroed.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace setscore

#endif  // SETSCORE_CHECKPOINT_H_
