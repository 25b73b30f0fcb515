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

#include "setscore/model.h"

#include <cmath>
#include <string>

#include "setscore/errors.h"

namespace setscore {
namespace {

Tensor gather_rows(ItemRefs items, std::size_t dim,
                   const std::vector<double> Item::*field, const char* what) {
  Tensor out({items.size(), dim});
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::vector<double>& v = items[i]->*field;
    if (v.size() != dim) {
      throw ContractViolation(std::string("item '") + items[i]->item_id +
                              "' has " + what + " of length " +
                              std::to_string(v.size()) + ", model expects " +
                              std::to_string(dim));
    }
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

Tensor row_as_vector(const Tensor& m, std::size_t r) {
  auto row = m.row(r);
  return Tensor::vector(std::vector<double>(row.begin(), row.end()));
}

// out[j] += sum_k v[k] * w[k, j]
void add_vec_mat(std::span<const double> v, const Tensor& w,
                 std::span<double> out) {
  const std::size_t cols = w.cols();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) out[j] += v[k] * w.at(k, j);
  }
}

// out[k] += sum_j w[k, j] * d[j]
void add_mat_vec(const Tensor& w, std::span<const double> d,
                 std::span<double> out) {
  const std::size_t cols = w.cols();
  for (std::size_t k = 0; k < w.rows(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += w.at(k, j) * d[j];
    out[k] += acc;
  }
}

// g[k, j] += a[k] * b[j]
void add_outer(std::span<const double> a, std::span<const double> b,
               std::span<double> g) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) g[k * b.size() + j] += a[k] * b[j];
  }
}

}  // namespace

ModalitySet ModalitySet::parse(std::string_view text) {
  ModalitySet set;
  if (text == "full" || text == "all") return all();
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of(",+", start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view name = text.substr(start, end - start);
    if (name == "image") {
      set.image = true;
    } else if (name == "title") {
      set.title = true;
    } else if (name == "category") {
      set.category = true;
    } else {
      throw ConfigError("unknown modality '" + std::string(name) +
                        "' (image|title|category)");
    }
    start = end + 1;
  }
  return set;
}

std::vector<ModalitySet> ModalitySet::every_subset() {
  std::vector<ModalitySet> out;
  for (int mask = 1; mask < 8; ++mask) {
    out.push_back({(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0});
  }
  return out;
}

std::string ModalitySet::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += "+";
    out += name;
  };
  add(image, "image");
  add(title, "title");
  add(category, "category");
  return out;
}

const char* pooling_name(Pooling p) {
  switch (p) {
    case Pooling::kMean:
      return "mean";
    case Pooling::kMax:
      return "max";
    case Pooling::kRnn:
      return "rnn";
  }
  return "?";
}

Pooling parse_pooling(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "max") return Pooling::kMax;
  if (name == "rnn") return Pooling::kRnn;
  throw ConfigError("unknown pooling '" + std::string(name) +
                    "' (mean|max|rnn)");
}

const char* objective_name(Objective o) {
  return o == Objective::kClassification ? "classification" : "siamese";
}

Objective parse_objective(std::string_view name) {
  if (name == "classification") return Objective::kClassification;
  if (name == "siamese") return Objective::kSiamese;
  throw ConfigError("unknown objective '" + std::string(name) +
                    "' (classification|siamese)");
}

void ModelConfig::validate() const {
  if (modalities.count() == 0) throw ConfigError("no modality selected");
  if (embed_dim == 0) throw ConfigError("embed_dim must be positive");
  if (category_count == 0) throw ConfigError("category_count must be positive");
  if (category_embed_dim == 0) {
    throw ConfigError("category_embed_dim must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must lie in [0,1)");
  }
  if (outfit_len == 0) throw ConfigError("outfit_len must be positive");
}

std::vector<ParamRef> ModelParams::named() {
  std::vector<ParamRef> out;
  auto add = [&](const char* name, Tensor& t) { out.push_back({name, &t}); };
  auto add_opt = [&](const char* name, std::optional<Tensor>& t) {
    if (t) out.push_back({name, &*t});
  };
  add_opt("image.weight", image_weight);
  add_opt("image.bias", image_bias);
  add_opt("title.weight", title_weight);
  add_opt("title.bias", title_bias);
  add_opt("category.table", category_table);
  add_opt("category.weight", category_weight);
  add_opt("category.bias", category_bias);
  add("fusion.w1", fusion_w1);
  add("fusion.b1", fusion_b1);
  add("fusion.w2", fusion_w2);
  add("fusion.b2", fusion_b2);
  add_opt("rnn.wh", rnn_wh);
  add_opt("rnn.wx", rnn_wx);
  add_opt("rnn.bias", rnn_bias);
  add("classifier.weight", classifier_weight);
  add("classifier.bias", classifier_bias);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (const ParamRef& p : const_cast<ModelParams*>(this)->named()) {
    out.emplace_back(p.name, p.tensor);
  }
  return out;
}

void ModelParams::zero_grads() {
  for (const ParamRef& p : named()) {
    p.tensor->enable_grad();
    p.tensor->zero_grad();
  }
}

bool ModelParams::all_finite() const {
  for (const auto& [name, t] : named()) {
    if (!t->all_finite()) return false;
  }
  return true;
}

Tensor glorot_uniform(const Shape& shape, Rng& rng) {
  const double fan_in = shape.empty() ? 1.0 : static_cast<double>(shape[0]);
  const double fan_out = shape.size() < 2 ? 1.0 : static_cast<double>(shape[1]);
  const double a = std::sqrt(6.0 / std::max(1.0, fan_in + fan_out));
  Tensor t(shape);
  for (double& v : t.data()) v = rng.uniform(-a, a);
  return t;
}

ModelParams init_params(const ModelConfig& config, Rng& rng) {
  config.validate();
  const std::size_t d = config.embed_dim;
  const std::size_t hidden = config.hidden_width();
  ModelParams p;
  if (config.modalities.image) {
    p.image_weight = glorot_uniform({config.image_dim, d}, rng);
    p.image_bias = Tensor({d});
  }
  if (config.modalities.title) {
    p.title_weight = glorot_uniform({config.title_dim, d}, rng);
    p.title_bias = Tensor({d});
  }
  if (config.modalities.category) {
    Tensor table({config.category_count, config.category_embed_dim});
    for (double& v : table.data()) v = rng.uniform(-0.05, 0.05);
    p.category_table = std::move(table);
    p.category_weight = glorot_uniform({config.category_embed_dim, d}, rng);
    p.category_bias = Tensor({d});
  }
  p.fusion_w1 = glorot_uniform({config.modalities.count() * d, hidden}, rng);
  p.fusion_b1 = Tensor({hidden});
  p.fusion_w2 = glorot_uniform({hidden, d}, rng);
  p.fusion_b2 = Tensor({d});
  if (config.pooling == Pooling::kRnn) {
    p.rnn_wh = glorot_uniform({d, d}, rng);
    p.rnn_wx = glorot_uniform({d, d}, rng);
    p.rnn_bias = Tensor({d});
  }
  p.classifier_weight = glorot_uniform({d}, rng);
  p.classifier_bias = Tensor::scalar(0.0);
  for (const ParamRef& ref : p.named()) {
    ref.tensor->enable_grad();
    p.adam.push_back(AdamState::zeros_like(*ref.tensor));
  }
  return p;
}

std::vector<const Item*> item_refs(const LabeledOutfit& outfit) {
  std::vector<const Item*> refs;
  refs.reserve(outfit.items.size());
  for (const Item& item : outfit.items) refs.push_back(&item);
  return refs;
}

ItemEncoding encode_items(ItemRefs items, const ModelConfig& config,
                          const ModelParams& params, Mode mode, Rng* rng) {
  ItemEncoding enc;
  if (config.modalities.image) {
    enc.image_in = gather_rows(items, config.image_dim, &Item::image,
                               "an image feature");
    enc.projected.push_back(
        linear_forward(enc.image_in, *params.image_weight, *params.image_bias));
  }
  if (config.modalities.title) {
    enc.title_in = gather_rows(items, config.title_dim, &Item::title_vector,
                               "a title vector");
    enc.projected.push_back(
        linear_forward(enc.title_in, *params.title_weight, *params.title_bias));
  }
  if (config.modalities.category) {
    enc.category_ids.reserve(items.size());
    for (const Item* item : items) enc.category_ids.push_back(item->category_id);
    enc.category_embedding =
        embedding_lookup(*params.category_table, enc.category_ids);
    enc.projected.push_back(linear_forward(enc.category_embedding,
                                           *params.category_weight,
                                           *params.category_bias));
  }
  enc.fused = concat_features(enc.projected);
  enc.hidden_pre = linear_forward(enc.fused, params.fusion_w1, params.fusion_b1);
  enc.hidden = relu_forward(enc.hidden_pre);
  const bool training = mode == Mode::kTrain && config.dropout_rate > 0.0;
  if (training && rng == nullptr) {
    throw ContractViolation("encode_items: training mode needs an rng");
  }
  Rng unused(0);
  enc.dropped = dropout_forward(enc.hidden, config.dropout_rate, training,
                                rng != nullptr ? *rng : unused);
  enc.output =
      linear_forward(enc.dropped.output, params.fusion_w2, params.fusion_b2);
  return enc;
}

void encode_items_backward(const ItemEncoding& enc, const Tensor& d_output,
                           const ModelConfig& config, ModelParams& params) {
  Tensor d_dropped = linear_backward(enc.dropped.output, params.fusion_w2,
                                     params.fusion_b2, d_output);
  Tensor d_hidden = dropout_backward(enc.dropped.mask, d_dropped);
  Tensor d_pre = relu_backward(enc.hidden_pre, d_hidden);
  Tensor d_fused =
      linear_backward(enc.fused, params.fusion_w1, params.fusion_b1, d_pre);
  std::vector<std::size_t> widths(enc.projected.size(), config.embed_dim);
  std::vector<Tensor> d_parts = concat_backward(d_fused, widths);
  std::size_t k = 0;
  if (config.modalities.image) {
    linear_backward(enc.image_in, *params.image_weight, *params.image_bias,
                    d_parts[k++], /*need_dx=*/false);
  }
  if (config.modalities.title) {
    linear_backward(enc.title_in, *params.title_weight, *params.title_bias,
                    d_parts[k++], /*need_dx=*/false);
  }
  if (config.modalities.category) {
    Tensor d_emb =
        linear_backward(enc.category_embedding, *params.category_weight,
                        *params.category_bias, d_parts[k++]);
    embedding_backward(*params.category_table, enc.category_ids, d_emb);
  }
}

Tensor encode_item(const Item& item, const ModelConfig& config,
                   const ModelParams& params, Mode mode, Rng* rng) {
  const Item* ref = &item;
  ItemEncoding enc = encode_items(ItemRefs(&ref, 1), config, params, mode, rng);
  return row_as_vector(enc.output, 0);
}

PoolState pool_outfit(const Tensor& item_embeddings, const ModelConfig& config,
                      const ModelParams& params) {
  const std::size_t m = item_embeddings.rows();
  if (m == 0) throw ContractViolation("pool_outfit: empty outfit");
  PoolState pool;
  pool.kind = config.pooling;
  pool.inputs = item_embeddings;
  switch (config.pooling) {
    case Pooling::kMean:
    case Pooling::kMax:
      pool.reduced = reduce_set(item_embeddings, config.pooling == Pooling::kMean
                                                     ? Reduction::kMean
                                                     : Reduction::kMax);
      pool.output = pool.reduced.output;
      break;
    case Pooling::kRnn: {
      const std::size_t d = item_embeddings.cols();
      const Tensor& wh = *params.rnn_wh;
      const Tensor& wx = *params.rnn_wx;
      const Tensor& bias = *params.rnn_bias;
      pool.states.push_back(Tensor({d}));
      for (std::size_t j = 0; j < m; ++j) {
        Tensor pre = bias;
        add_vec_mat(pool.states.back().data(), wh, pre.data());
        add_vec_mat(item_embeddings.row(j), wx, pre.data());
        pool.states.push_back(tanh_forward(pre));
      }
      pool.output = pool.states.back();
      break;
    }
  }
  return pool;
}

Tensor pool_outfit_backward(const PoolState& pool, const Tensor& d_output,
                            ModelParams& params) {
  if (pool.kind != Pooling::kRnn) {
    return reduce_set_backward(pool.reduced,
                               pool.kind == Pooling::kMean ? Reduction::kMean
                                                           : Reduction::kMax,
                               d_output);
  }
  Tensor& wh = *params.rnn_wh;
  Tensor& wx = *params.rnn_wx;
  Tensor& bias = *params.rnn_bias;
  wh.enable_grad();
  wx.enable_grad();
  bias.enable_grad();
  const std::size_t m = pool.inputs.rows();
  const std::size_t d = pool.inputs.cols();
  Tensor d_inputs({m, d});
  Tensor d_state = d_output;
  for (std::size_t j = m; j-- > 0;) {
    // states[j + 1] = tanh(states[j] W_h + inputs[j] W_x + B)
    Tensor d_pre = tanh_backward(pool.states[j + 1], d_state);
    auto gb = bias.grad();
    for (std::size_t k = 0; k < d; ++k) gb[k] += d_pre[k];
    add_outer(pool.states[j].data(), d_pre.data(), wh.grad());
    add_outer(pool.inputs.row(j), d_pre.data(), wx.grad());
    add_mat_vec(wx, d_pre.data(), d_inputs.row(j));
    Tensor prev({d});
    add_mat_vec(wh, d_pre.data(), prev.data());
    d_state = std::move(prev);
  }
  return d_inputs;
}

OutfitPass forward_outfit(ItemRefs items, const ModelConfig& config,
                          const ModelParams& params, Mode mode, Rng* rng) {
  if (items.empty()) throw ContractViolation("score_outfit: empty outfit");
  OutfitPass pass;
  pass.items = encode_items(items, config, params, mode, rng);
  pass.pool = pool_outfit(pass.items.output, config, params);
  double logit = params.classifier_bias[0];
  for (std::size_t k = 0; k < config.embed_dim; ++k) {
    logit += params.classifier_weight[k] * pass.pool.output[k];
  }
  pass.score = {sigmoid(logit), logit};
  return pass;
}

void backward_outfit(const OutfitPass& pass, double d_logit,
                     const ModelConfig& config, ModelParams& params) {
  params.classifier_weight.enable_grad();
  params.classifier_bias.enable_grad();
  auto gw = params.classifier_weight.grad();
  Tensor d_pooled({config.embed_dim});
  for (std::size_t k = 0; k < config.embed_dim; ++k) {
    gw[k] += d_logit * pass.pool.output[k];
    d_pooled[k] = d_logit * params.classifier_weight[k];
  }
  params.classifier_bias.grad()[0] += d_logit;
  Tensor d_items = pool_outfit_backward(pass.pool, d_pooled, params);
  encode_items_backward(pass.items, d_items, config, params);
}

ScoreResult score_outfit(ItemRefs items, const ModelConfig& config,
                         const ModelParams& params, Mode mode, Rng* rng) {
  return forward_outfit(items, config, params, mode, rng).score;
}

ScoreResult score_outfit(const LabeledOutfit& outfit, const ModelConfig& config,
                         const ModelParams& params) {
  auto refs = item_refs(outfit);
  return score_outfit(refs, config, params);
}

double outfit_loss(std::span<const LabeledOutfit* const> batch,
                   const ModelConfig& config, ModelParams& params, Rng& rng,
                   Mode mode, bool backward) {
  if (batch.empty()) throw ContractViolation("outfit_loss: empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const LabeledOutfit* outfit : batch) {
    auto refs = item_refs(*outfit);
    OutfitPass pass = forward_outfit(refs, config, params, mode, &rng);
    BceResult bce = bce_with_logit(pass.score.logit, outfit->label);
    total += bce.loss;
    if (backward) backward_outfit(pass, bce.dlogit * scale, config, params);
  }
  return total * scale;
}

double contrastive_loss_value(double distance, int label, double margin) {
  if (label != 0) return distance * distance;
  const double gap = std::max(margin - distance, 0.0);
  return gap * gap;
}

SiameseResult siamese_loss(ItemRefs items, int label, const ModelConfig& config,
                           ModelParams& params, const SiameseConfig& siamese,
                           Rng& rng, Mode mode, bool backward,
                           double grad_scale) {
  const std::size_t m = items.size();
  if (m < 2) {
    throw ContractViolation("siamese_loss: outfit needs at least 2 items");
  }
  SiameseResult result;
  result.pivot = static_cast<std::size_t>(rng.uniform_int(m));

  ItemEncoding enc = encode_items(items, config, params, mode, &rng);
  const std::size_t d = config.embed_dim;
  Tensor query({m - 1, d});
  for (std::size_t i = 0, q = 0; i < m; ++i) {
    if (i == result.pivot) continue;
    auto src = enc.output.row(i);
    std::copy(src.begin(), src.end(), query.row(q++).begin());
  }
  PoolState pool = pool_outfit(query, config, params);
  auto pivot_row = enc.output.row(result.pivot);

  Tensor diff({d});
  double sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    diff[k] = pool.output[k] - pivot_row[k];
    sq += diff[k] * diff[k];
  }
  result.distance = std::sqrt(sq);
  result.loss = contrastive_loss_value(result.distance, label, siamese.margin);
  if (!backward) return result;

  double d_dist = label != 0
                      ? 2.0 * result.distance
                      : -2.0 * std::max(siamese.margin - result.distance, 0.0);
  d_dist *= grad_scale;
  Tensor d_pool({d});
  Tensor d_items({m, d});
  if (result.distance > 0.0) {
    for (std::size_t k = 0; k < d; ++k) {
      const double g = d_dist * diff[k] / result.distance;
      d_pool[k] = g;
      d_items.at(result.pivot, k) = -g;
    }
  }
  Tensor d_query = pool_outfit_backward(pool, d_pool, params);
  for (std::size_t i = 0, q = 0; i < m; ++i) {
    if (i == result.pivot) continue;
    for (std::size_t k = 0; k < d; ++k) d_items.at(i, k) += d_query.at(q, k);
    ++q;
  }
  encode_items_backward(enc, d_items, config, params);
  return result;
}

double siamese_batch_loss(std::span<const LabeledOutfit* const> batch,
                          const ModelConfig& config, ModelParams& params,
                          const SiameseConfig& siamese, Rng& rng, Mode mode,
                          bool backward) {
  if (batch.empty()) throw ContractViolation("siamese_batch_loss: empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const LabeledOutfit* outfit : batch) {
    auto refs = item_refs(*outfit);
    total += siamese_loss(refs, outfit->label, config, params, siamese, rng,
                          mode, backward, scale)
                 .loss;
  }
  return total * scale;
}

double siamese_score(ItemRefs items, const ModelConfig& config,
                     const ModelParams& params) {
  const std::size_t m = items.size();
  if (m < 2) {
    throw ContractViolation("siamese_score: outfit needs at least 2 items");
  }
  ItemEncoding enc = encode_items(items, config, params, Mode::kInfer);
  const std::size_t d = config.embed_dim;
  Tensor query({m - 1, d});
  for (std::size_t i = 1; i < m; ++i) {
    auto src = enc.output.row(i);
    std::copy(src.begin(), src.end(), query.row(i - 1).begin());
  }
  PoolState pool = pool_outfit(query, config, params);
  double sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = pool.output[k] - enc.output.at(0, k);
    sq += diff * diff;
  }
  return -std::sqrt(sq);
}

double quality_score(ItemRefs items, const ModelConfig& config,
                     const ModelParams& params, Objective objective) {
  if (objective == Objective::kSiamese) {
    return siamese_score(items, config, params);
  }
  return score_outfit(items, config, params).probability;
}

}  // namespace setscore
