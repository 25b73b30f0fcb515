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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "json.hpp"
#include "setscore/checkpoint.h"
#include "setscore/digest.h"
#include "setscore/errors.h"
#include "setscore/model.h"
#include "setscore/model_gradcheck.h"

namespace setscore {
namespace {

namespace fs = std::filesystem;

ModelConfig small_config(Pooling pooling = Pooling::kMean,
                         ModalitySet m = ModalitySet::all()) {
  ModelConfig c;
  c.embed_dim = 4;
  c.image_dim = 5;
  c.title_dim = 3;
  c.category_count = 4;
  c.category_embed_dim = 6;
  c.modalities = m;
  c.pooling = pooling;
  return c;
}

Item random_item(const ModelConfig& c, Rng& rng, const std::string& id) {
  Item item;
  item.item_id = id;
  item.category_id = rng.uniform_int(c.category_count);
  item.image.resize(c.image_dim);
  for (double& v : item.image) v = rng.normal();
  item.title_vector.resize(c.title_dim);
  for (double& v : item.title_vector) v = rng.normal();
  return item;
}

LabeledOutfit random_outfit(const ModelConfig& c, Rng& rng, int label = 1) {
  LabeledOutfit o{"o", label, {}};
  for (int i = 0; i < 4; ++i) o.items.push_back(random_item(c, rng, "i" + std::to_string(i)));
  return o;
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::path(testing::TempDir()) / ("setscore_model_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(ModalitySet, ParseAndSubsets) {
  EXPECT_EQ(ModalitySet::parse("title,category"), (ModalitySet{false, true, true}));
  EXPECT_EQ(ModalitySet::parse("image+category").to_string(), "image+category");
  EXPECT_EQ(ModalitySet::parse("full"), ModalitySet::all());
  EXPECT_THROW(ModalitySet::parse("color"), ConfigError);
  EXPECT_EQ(ModalitySet::every_subset().size(), 7u);
}

TEST(Encode, ZeroInputsZeroBiasesGiveZero) {
  ModelConfig c = small_config();
  Rng rng(1);
  ModelParams p = init_params(c, rng);
  for (double& v : p.category_table->data()) v = 0.0;
  Item item;
  item.item_id = "z";
  item.image.assign(c.image_dim, 0.0);
  item.title_vector.assign(c.title_dim, 0.0);
  Tensor f = encode_item(item, c, p);
  for (double v : f.data()) EXPECT_EQ(v, 0.0);
}

TEST(Encode, IdentityWeightsPassRawVector) {
  ModelConfig c = small_config(Pooling::kMean, {true, false, false});
  c.image_dim = 4;
  c.dropout_rate = 0.0;
  Rng rng(2);
  ModelParams p = init_params(c, rng);
  auto eye = [](std::size_t n) {
    Tensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
  };
  *p.image_weight = eye(4);
  p.fusion_w1 = eye(4);
  p.fusion_w2 = eye(4);
  Item item;
  item.item_id = "x";
  item.image = {1, 2, 3, 4};  // non-negative so the ReLU is transparent
  EXPECT_EQ(encode_item(item, c, p).values(), item.image);
}

TEST(Encode, MissingModalityIsContractViolation) {
  ModelConfig c = small_config();
  Rng rng(3);
  ModelParams p = init_params(c, rng);
  Item item = random_item(c, rng, "x");
  item.title_vector.clear();
  EXPECT_THROW(encode_item(item, c, p), ContractViolation);
}

TEST(Pool, MeanAndRnnCollapse) {
  ModelConfig c = small_config(Pooling::kMean);
  c.embed_dim = 2;
  Rng rng(4);
  ModelParams p = init_params(c, rng);
  EXPECT_EQ(pool_outfit(Tensor::matrix({{1, 2}, {3, 4}}), c, p).output,
            Tensor::vector({2, 3}));

  c.pooling = Pooling::kRnn;
  ModelParams r = init_params(c, rng);
  *r.rnn_wh = Tensor({2, 2});
  *r.rnn_wx = Tensor::matrix({{1, 0}, {0, 1}});
  *r.rnn_bias = Tensor({2});
  Tensor out = pool_outfit(Tensor::matrix({{0.3, -1.2}}), c, r).output;
  EXPECT_DOUBLE_EQ(out[0], std::tanh(0.3));
  EXPECT_DOUBLE_EQ(out[1], std::tanh(-1.2));
  EXPECT_THROW(pool_outfit(Tensor({0, 2}), c, r), ContractViolation);
}

TEST(Pool, RnnIsOrderSensitive) {
  ModelConfig c = small_config(Pooling::kRnn);
  Rng rng(5);
  ModelParams p = init_params(c, rng);
  Tensor xs({3, c.embed_dim});
  for (double& v : xs.data()) v = rng.normal();
  Tensor rev({3, c.embed_dim});
  for (std::size_t i = 0; i < 3; ++i) {
    std::copy(xs.row(2 - i).begin(), xs.row(2 - i).end(), rev.row(i).begin());
  }
  EXPECT_NE(pool_outfit(xs, c, p).output, pool_outfit(rev, c, p).output);
}

TEST(Score, ZeroClassifierGivesHalf) {
  ModelConfig c = small_config();
  Rng rng(6);
  ModelParams p = init_params(c, rng);
  for (double& v : p.classifier_weight.data()) v = 0.0;
  p.classifier_bias[0] = 0.0;
  EXPECT_EQ(score_outfit(random_outfit(c, rng), c, p).probability, 0.5);
}

TEST(Score, PermutationInvariantForMeanAndMax) {
  Rng rng(7);
  for (Pooling pooling : {Pooling::kMean, Pooling::kMax}) {
    ModelConfig c = small_config(pooling);
    for (int trial = 0; trial < 50; ++trial) {
      ModelParams p = init_params(c, rng);
      LabeledOutfit o = random_outfit(c, rng);
      LabeledOutfit q = o;
      std::span<Item> items(q.items);
      rng.shuffle(items);
      EXPECT_NEAR(score_outfit(o, c, p).probability,
                  score_outfit(q, c, p).probability, 1e-12);
    }
  }
}

TEST(Score, BoundsMonotoneAndDeterministic) {
  ModelConfig c = small_config(Pooling::kMax);
  Rng rng(8);
  ModelParams p = init_params(c, rng);
  LabeledOutfit o = random_outfit(c, rng);
  double prev = 0.0;
  for (double b = -5; b <= 5; b += 0.5) {
    p.classifier_bias[0] = b;
    const double s = score_outfit(o, c, p).probability;
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
    EXPECT_GT(s, prev);
    prev = s;
    EXPECT_EQ(s, score_outfit(o, c, p).probability);
  }
}

TEST(Loss, ZeroLogitsGiveLn2) {
  ModelConfig c = small_config();
  Rng rng(9);
  ModelParams p = init_params(c, rng);
  for (double& v : p.classifier_weight.data()) v = 0.0;
  p.classifier_bias[0] = 0.0;
  LabeledOutfit a = random_outfit(c, rng, 1), b = random_outfit(c, rng, 0);
  std::vector<const LabeledOutfit*> batch = {&a, &b};
  p.zero_grads();
  EXPECT_EQ(outfit_loss(batch, c, p, rng), std::log(2.0));
}

TEST(Loss, SeparatedBatchIsNearZero) {
  ModelConfig c = small_config();
  Rng rng(10);
  ModelParams p = init_params(c, rng);
  for (double& v : p.classifier_weight.data()) v = 0.0;
  p.classifier_bias[0] = 20.0;
  LabeledOutfit a = random_outfit(c, rng, 1), b = random_outfit(c, rng, 1);
  std::vector<const LabeledOutfit*> batch = {&a, &b};
  p.zero_grads();
  EXPECT_LT(outfit_loss(batch, c, p, rng), 1e-8);
}

TEST(Siamese, ContrastiveValues) {
  EXPECT_EQ(contrastive_loss_value(2, 1, 10), 4);
  EXPECT_EQ(contrastive_loss_value(2, 0, 10), 64);
  EXPECT_EQ(contrastive_loss_value(11, 0, 10), 0);
}

TEST(Siamese, LossMatchesDistanceAndScoreIsNegativeDistance) {
  ModelConfig c = small_config();
  Rng rng(11);
  ModelParams p = init_params(c, rng);
  LabeledOutfit o = random_outfit(c, rng);
  auto refs = item_refs(o);
  Rng r(3);
  SiameseResult s = siamese_loss(refs, 1, c, p, {}, r, Mode::kInfer, false);
  EXPECT_NEAR(s.loss, s.distance * s.distance, 1e-12);
  EXPECT_LE(siamese_score(refs, c, p), 0.0);
  auto single = std::vector<const Item*>{refs[0]};
  EXPECT_THROW(siamese_loss(single, 1, c, p, {}, r), ContractViolation);
}

TEST(Init, SameSeedSameParamsAndShapes) {
  ModelConfig c = small_config(Pooling::kRnn);
  Rng a(12), b(12);
  ModelParams pa = init_params(c, a), pb = init_params(c, b);
  auto na = pa.named();
  auto nb = pb.named();
  ASSERT_EQ(na.size(), nb.size());
  for (std::size_t i = 0; i < na.size(); ++i) EXPECT_EQ(*na[i].tensor, *nb[i].tensor);
  EXPECT_EQ(pa.image_weight->shape(), (Shape{5, 4}));
  EXPECT_EQ(pa.category_table->shape(), (Shape{4, 6}));
  EXPECT_EQ(pa.fusion_w1.shape(), (Shape{12, 4}));
  EXPECT_EQ(pa.rnn_wh->shape(), (Shape{4, 4}));
  EXPECT_EQ(pa.classifier_bias.size(), 1u);
  EXPECT_EQ(pa.adam.size(), na.size());
}

TEST(Init, GlorotMoments) {
  Rng rng(13);
  Tensor w = glorot_uniform({1000, 1000}, rng);
  const double a = std::sqrt(6.0 / 2000.0);
  double sum = 0, sq = 0;
  for (double v : w.data()) {
    sum += v;
    sq += v * v;
    ASSERT_LE(std::abs(v), a);
  }
  const double n = static_cast<double>(w.size());
  const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
  EXPECT_NEAR(sd, a / std::sqrt(3.0), 0.05 * a / std::sqrt(3.0));
}

TEST(SharedParameters, CategoryGradientAccumulates) {
  ModelConfig c = small_config(Pooling::kMean, {false, false, true});
  Rng rng(14);
  ModelParams p = init_params(c, rng);
  Item a = random_item(c, rng, "a"), b = random_item(c, rng, "b");
  b.category_id = a.category_id;
  auto grad_of = [&](std::vector<const Item*> items) {
    p.zero_grads();
    ItemEncoding enc = encode_items(items, c, p, Mode::kInfer);
    Tensor ones(enc.output.shape());
    for (double& v : ones.data()) v = 1.0;
    encode_items_backward(enc, ones, c, p);
    auto g = p.category_table->grad();
    return std::vector<double>(g.begin(), g.end());
  };
  auto both = grad_of({&a, &b});
  auto ga = grad_of({&a});
  auto gb = grad_of({&b});
  for (std::size_t i = 0; i < both.size(); ++i) {
    EXPECT_NEAR(both[i], ga[i] + gb[i], 1e-12);
  }
}

TEST(Gradcheck, EveryConfigurationPasses) {
  GradcheckOptions opts;
  opts.seed = 21;
  for (const ModelGradcheckCase& c : default_gradcheck_cases()) {
    GradcheckReport r = gradcheck_model(c, opts);
    EXPECT_LT(r.max_rel_error, 1e-4) << c.label() << " worst " << r.worst_param;
  }
}

TEST(Gradcheck, InjectedFaultIsDetected) {
  GradcheckReport r = gradcheck_model(default_gradcheck_cases().front(), {}, true);
  EXPECT_GT(r.max_rel_error, 1e-2);
}

TEST(Checkpoint, RoundTripIsStable) {
  ModelConfig c = small_config(Pooling::kRnn);
  c.fusion_hidden = 7;
  Rng rng(15);
  ModelParams p = init_params(c, rng);
  LabeledOutfit o = random_outfit(c, rng);
  const double before = score_outfit(o, c, p).probability;
  const fs::path dir = scratch_dir("ckpt");
  save_checkpoint(p, c, dir / "a");
  Checkpoint loaded = load_checkpoint(dir / "a");
  EXPECT_EQ(loaded.config, c);
  EXPECT_NEAR(score_outfit(o, loaded.config, loaded.params).probability, before,
              1e-5);
  save_checkpoint(loaded.params, loaded.config, dir / "b");
  EXPECT_EQ(directory_digest(dir / "a"), directory_digest(dir / "b"));
}

TEST(Checkpoint, CorruptionIsRejected) {
  ModelConfig c = small_config();
  Rng rng(16);
  ModelParams p = init_params(c, rng);
  const fs::path dir = scratch_dir("corrupt");
  save_checkpoint(p, c, dir / "ck");

  fs::copy(dir / "ck", dir / "trunc");
  fs::resize_file(dir / "trunc" / "fusion.w1.f32", 8);
  try {
    load_checkpoint(dir / "trunc");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("digest"), std::string::npos);
  }

  auto edit_manifest = [&](const std::string& name, auto&& fn) {
    fs::copy(dir / "ck", dir / name);
    auto j = nlohmann::json::parse(read_file_bytes(dir / name / "manifest.json"));
    fn(j);
    write_file_bytes(dir / name / "manifest.json", j.dump());
  };
  edit_manifest("schema", [](auto& j) { j["schema"] = "ckpt.v0"; });
  EXPECT_THROW(load_checkpoint(dir / "schema"), DataError);
  edit_manifest("shape", [](auto& j) { j["tensors"]["fusion.w1"]["shape"] = {3, 3}; });
  EXPECT_THROW(load_checkpoint(dir / "shape"), DataError);
}

}  // namespace
}  // namespace setscore
