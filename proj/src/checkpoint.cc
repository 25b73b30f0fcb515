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


#include "setscore/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <set>
#include <string>

#include "setscore/digest.h"
#include "setscore/errors.h"

namespace setscore {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string encode_f32(const Tensor& t) {
  std::string out;
  out.reserve(t.size() * 4);
  for (double v : t.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) {
      out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
    }
  }
  return out;
}

void decode_f32(std::string_view bytes, Tensor& t) {
  auto data = t.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(
                  static_cast<unsigned char>(bytes[i * 4 + b]))
              << (8 * b);
    }
    data[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
}

std::string file_name_for(const std::string& name) { return name + ".f32"; }

template <typename T>
T get_field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ordered_json config_to_json(const ModelConfig& c) {
  ordered_json j;
  j["embed_dim"] = c.embed_dim;
  j["modalities"] = c.modalities.to_string();
  j["pooling"] = pooling_name(c.pooling);
  j["dropout_rate"] = c.dropout_rate;
  j["fusion_hidden"] = c.fusion_hidden;
  j["category_count"] = c.category_count;
  j["category_embed_dim"] = c.category_embed_dim;
  j["image_dim"] = c.image_dim;
  j["title_dim"] = c.title_dim;
  j["outfit_len"] = c.outfit_len;
  return j;
}

ModelConfig config_from_json(const json& j, ModelConfig c) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  static const std::set<std::string> known = {
      "embed_dim",     "modalities",         "pooling",   "dropout_rate",
      "fusion_hidden", "category_count",     "category_embed_dim",
      "image_dim",     "title_dim",          "outfit_len"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError("unknown model config key '" + key + "'");
    }
  }
  c.embed_dim = get_field(j, "embed_dim", c.embed_dim);
  if (j.contains("modalities")) {
    c.modalities = ModalitySet::parse(get_field<std::string>(j, "modalities", ""));
  }
  if (j.contains("pooling")) {
    c.pooling = parse_pooling(get_field<std::string>(j, "pooling", ""));
  }
  c.dropout_rate = get_field(j, "dropout_rate", c.dropout_rate);
  c.fusion_hidden = get_field(j, "fusion_hidden", c.fusion_hidden);
  c.category_count = get_field(j, "category_count", c.category_count);
  c.category_embed_dim = get_field(j, "category_embed_dim", c.category_embed_dim);
  c.image_dim = get_field(j, "image_dim", c.image_dim);
  c.title_dim = get_field(j, "title_dim", c.title_dim);
  c.outfit_len = get_field(j, "outfit_len", c.outfit_len);
  return c;
}

void save_checkpoint(const ModelParams& params, const ModelConfig& config,
                     const fs::path& dir) {
  config.validate();
  fs::path tmp = dir;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  ordered_json manifest;
  manifest["schema"] = kCheckpointSchema;
  manifest["config"] = config_to_json(config);
  ordered_json table = ordered_json::object();
  for (const auto& [name, tensor] : params.named()) {
    if (!tensor->all_finite()) {
      throw NumericError("save_checkpoint: tensor '" + name +
                         "' has non-finite values");
    }
    const std::string bytes = encode_f32(*tensor);
    const std::string file = file_name_for(name);
    write_file_bytes(tmp / file, bytes);
    ordered_json entry;
    entry["shape"] = tensor->shape();
    entry["dtype"] = "f32";
    entry["file"] = file;
    entry["byte_length"] = bytes.size();
    entry["digest"] = "sha256:" + sha256_hex(bytes);
    table[name] = std::move(entry);
  }
  manifest["tensors"] = std::move(table);
  write_file_bytes(tmp / "manifest.json", manifest.dump(2) + "\n");

  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw DataError("checkpoint: no manifest.json in " + dir.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_file_bytes(manifest_path));
  } catch (const json::exception& e) {
    throw DataError("checkpoint: malformed manifest: " + std::string(e.what()));
  }
  const std::string schema = manifest.value("schema", std::string());
  if (schema != kCheckpointSchema) {
    throw DataError("checkpoint: unknown schema '" + schema + "', expected " +
                    kCheckpointSchema);
  }
  if (!manifest.contains("config") || !manifest.contains("tensors")) {
    throw DataError("checkpoint: manifest lacks config or tensors");
  }

  Checkpoint ckpt;
  ckpt.config = config_from_json(manifest["config"]);
  ckpt.config.validate();
  // Shapes and names come from a fresh initialization of the same config.
  Rng scratch(0);
  ckpt.params = init_params(ckpt.config, scratch);

  const json& table = manifest["tensors"];
  auto named = ckpt.params.named();
  if (table.size() != named.size()) {
    throw DataError("checkpoint: manifest lists " +
                    std::to_string(table.size()) + " tensors, config needs " +
                    std::to_string(named.size()));
  }
  for (const ParamRef& ref : named) {
    auto it = table.find(ref.name);
    if (it == table.end()) {
      throw DataError("checkpoint: tensor '" + ref.name + "' missing");
    }
    const json& entry = *it;
    const Shape shape = entry.at("shape").get<Shape>();
    if (shape != ref.tensor->shape()) {
      throw DataError("checkpoint: tensor '" + ref.name + "' has shape " +
                      shape_string(shape) + ", config implies " +
                      shape_string(ref.tensor->shape()));
    }
    if (entry.value("dtype", std::string()) != "f32") {
      throw DataError("checkpoint: tensor '" + ref.name + "' is not f32");
    }
    const std::string bytes =
        read_file_bytes(dir / entry.at("file").get<std::string>());
    const std::string digest = "sha256:" + sha256_hex(bytes);
    if (digest != entry.at("digest").get<std::string>()) {
      throw DataError("checkpoint: digest mismatch for tensor '" + ref.name +
                      "'");
    }
    if (bytes.size() != entry.at("byte_length").get<std::size_t>() ||
        bytes.size() != ref.tensor->size() * 4) {
      throw DataError("checkpoint: tensor '" + ref.name + "' has " +
                      std::to_string(bytes.size()) + " bytes");
    }
    decode_f32(bytes, *ref.tensor);
  }
  return ckpt;
}

}  // namespace setscore
