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


#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <gtest/gtest.h>

#include "setscore/adam.h"
#include "setscore/errors.h"
#include "setscore/gradcheck.h"
#include "setscore/layers.h"
#include "setscore/rng.h"
#include "setscore/tensor.h"

namespace setscore {
namespace {

// Central difference of f at t[idx], independent of the library checker.
double numeric_partial(const std::function<double()>& f, Tensor& t,
                       std::size_t idx, double eps = 1e-6) {
  const double orig = t[idx];
  t[idx] = orig + eps;
  const double plus = f();
  t[idx] = orig - eps;
  const double minus = f();
  t[idx] = orig;
  return (plus - minus) / (2 * eps);
}

Tensor random_tensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.normal();
  return t;
}

// Sum of upstream * output, i.e. a random linear probe of the output.
double probe(const Tensor& y, const Tensor& upstream) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * upstream[i];
  return s;
}

TEST(Tensor, ShapeAndSizeAgree) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ContractViolation);
  t.enable_grad();
  EXPECT_EQ(t.grad().size(), t.size());
}

TEST(Linear, IdentityWeights) {
  Tensor y = linear_forward(Tensor::matrix({{1, 2}}), Tensor::matrix({{1, 0}, {0, 1}}),
                            Tensor::vector({1, 1}));
  EXPECT_EQ(y, Tensor::matrix({{2, 3}}));
}

TEST(Linear, ZeroInputPassesBias) {
  Rng rng(1);
  Tensor w = random_tensor({2, 2}, rng);
  Tensor y = linear_forward(Tensor::matrix({{0, 0}}), w, Tensor::vector({5, -5}));
  EXPECT_EQ(y, Tensor::matrix({{5, -5}}));
}

TEST(Linear, BackwardWorkedExample) {
  Tensor x = Tensor::matrix({{1, 2}});
  Tensor w = Tensor::matrix({{3}, {4}});
  Tensor b = Tensor::vector({0});
  Tensor dx = linear_backward(x, w, b, Tensor::matrix({{1}}));
  EXPECT_EQ(dx, Tensor::matrix({{3, 4}}));
  EXPECT_DOUBLE_EQ(w.grad()[0], 1);
  EXPECT_DOUBLE_EQ(w.grad()[1], 2);
  // Finite-difference oracle on the same point.
  auto f = [&] { return linear_forward(x, w, b)[0]; };
  EXPECT_NEAR(numeric_partial(f, w, 0), 1, 1e-8);
  EXPECT_NEAR(numeric_partial(f, w, 1), 2, 1e-8);
  EXPECT_NEAR(numeric_partial(f, x, 0), 3, 1e-8);
  EXPECT_NEAR(numeric_partial(f, x, 1), 4, 1e-8);
}

TEST(Linear, BackwardMatchesFiniteDifferences) {
  Rng rng(2);
  Tensor x = random_tensor({3, 4}, rng), w = random_tensor({4, 2}, rng),
         b = random_tensor({2}, rng), up = random_tensor({3, 2}, rng);
  w.enable_grad();
  b.enable_grad();
  Tensor dx = linear_backward(x, w, b, up);
  auto f = [&] { return probe(linear_forward(x, w, b), up); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(dx[i], numeric_partial(f, x, i), 1e-7);
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(w.grad()[i], numeric_partial(f, w, i), 1e-7);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_NEAR(b.grad()[i], numeric_partial(f, b, i), 1e-7);
  }
}

TEST(Linear, ShapeMismatchNamesShapes) {
  try {
    linear_forward(Tensor({1, 3}), Tensor({2, 2}), Tensor({2}));
    FAIL();
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("[1,3]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[2,2]"), std::string::npos);
  }
}

TEST(Relu, ForwardBackwardAndIdempotence) {
  Tensor x = Tensor::vector({-1, 0, 2});
  EXPECT_EQ(relu_forward(x), Tensor::vector({0, 0, 2}));
  EXPECT_EQ(relu_backward(x, Tensor::vector({5, 5, 5})), Tensor::vector({0, 0, 5}));
  Rng rng(3);
  Tensor r = random_tensor({50}, rng);
  EXPECT_EQ(relu_forward(relu_forward(r)), relu_forward(r));
}

TEST(Dropout, IdentityCases) {
  Rng rng(4);
  Tensor x = random_tensor({10}, rng);
  EXPECT_EQ(dropout_forward(x, 0.0, true, rng).output, x);
  EXPECT_EQ(dropout_forward(x, 0.5, false, rng).output, x);
  EXPECT_THROW(dropout_forward(x, 1.0, true, rng), ConfigError);
}

TEST(Dropout, InvertedScalingKeepsMean) {
  Rng rng(5);
  Tensor ones({100000});
  for (double& v : ones.data()) v = 1.0;
  DropoutResult r = dropout_forward(ones, 0.5, true, rng);
  const double mean =
      std::accumulate(r.output.data().begin(), r.output.data().end(), 0.0) /
      1e5;
  EXPECT_NEAR(mean, 1.0, 0.005);
  for (double v : r.output.data()) EXPECT_TRUE(v == 0.0 || v == 2.0);
  // Backward reuses the mask.
  Tensor dx = dropout_backward(r.mask, ones);
  EXPECT_EQ(dx, r.output);
}

TEST(Dropout, SameSeedSameMask) {
  Tensor x({64});
  for (double& v : x.data()) v = 1.0;
  Rng a(9), b(9);
  EXPECT_EQ(dropout_forward(x, 0.3, true, a).mask,
            dropout_forward(x, 0.3, true, b).mask);
}

TEST(Embedding, LookupAccumulateAndBounds) {
  Tensor table = Tensor::matrix({{1, 1}, {2, 2}});
  const std::vector<std::size_t> ids = {1, 0};
  EXPECT_EQ(embedding_lookup(table, ids), Tensor::matrix({{2, 2}, {1, 1}}));

  Tensor t1 = Tensor::matrix({{0}, {0}});
  const std::vector<std::size_t> dup = {0, 0};
  embedding_backward(t1, dup, Tensor::matrix({{1}, {2}}));
  EXPECT_DOUBLE_EQ(t1.grad()[0], 3);
  EXPECT_DOUBLE_EQ(t1.grad()[1], 0);

  Tensor t3({3, 2});
  const std::vector<std::size_t> bad = {5};
  try {
    embedding_lookup(t3, bad);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
  }
}

TEST(Concat, ForwardAndRoundTrip) {
  std::vector<Tensor> parts = {Tensor::matrix({{1}}), Tensor::matrix({{2, 3}})};
  EXPECT_EQ(concat_features(parts), Tensor::matrix({{1, 2, 3}}));
  std::vector<Tensor> one = {Tensor::matrix({{4, 5}})};
  EXPECT_EQ(concat_features(one), one[0]);

  Rng rng(6);
  std::vector<Tensor> ps = {random_tensor({2, 1}, rng), random_tensor({2, 3}, rng)};
  Tensor up = random_tensor({2, 4}, rng);
  const std::vector<std::size_t> widths = {1, 3};
  auto grads = concat_backward(up, widths);
  for (std::size_t p = 0; p < ps.size(); ++p) {
    auto f = [&] { return probe(concat_features(ps), up); };
    for (std::size_t i = 0; i < ps[p].size(); ++i) {
      EXPECT_NEAR(grads[p][i], numeric_partial(f, ps[p], i), 1e-8);
    }
  }
  std::vector<Tensor> mismatched = {Tensor({1, 1}), Tensor({2, 1})};
  EXPECT_THROW(concat_features(mismatched), ContractViolation);
}

TEST(ReduceSet, MeanAndMax) {
  Tensor xs = Tensor::matrix({{1, 2}, {3, 4}});
  EXPECT_EQ(reduce_set(xs, Reduction::kMean).output, Tensor::vector({2, 3}));
  EXPECT_EQ(reduce_set(xs, Reduction::kMax).output, Tensor::vector({3, 4}));
  EXPECT_THROW(reduce_set(Tensor({0, 2}), Reduction::kMean), ContractViolation);
}

TEST(ReduceSet, MaxTieGoesToFirstRow) {
  Tensor xs = Tensor::matrix({{1, 7}, {1, 7}});
  ReduceResult r = reduce_set(xs, Reduction::kMax);
  Tensor dx = reduce_set_backward(r, Reduction::kMax, Tensor::vector({1, 1}));
  EXPECT_EQ(dx, Tensor::matrix({{1, 1}, {0, 0}}));
}

TEST(ReduceSet, BackwardMatchesFiniteDifferences) {
  Rng rng(7);
  for (Reduction kind : {Reduction::kMean, Reduction::kMax}) {
    Tensor xs = random_tensor({5, 3}, rng), up = random_tensor({3}, rng);
    Tensor dx = reduce_set_backward(reduce_set(xs, kind), kind, up);
    auto f = [&] { return probe(reduce_set(xs, kind).output, up); };
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_NEAR(dx[i], numeric_partial(f, xs, i), 1e-8);
    }
  }
}

TEST(ReduceSet, PermutationInvariant) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.uniform_int(6), d = 1 + rng.uniform_int(5);
    Tensor xs = random_tensor({m, d}, rng);
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    Tensor ps({m, d});
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(xs.row(perm[i]).begin(), xs.row(perm[i]).end(), ps.row(i).begin());
    }
    EXPECT_EQ(reduce_set(xs, Reduction::kMax).output,
              reduce_set(ps, Reduction::kMax).output);
    Tensor a = reduce_set(xs, Reduction::kMean).output;
    Tensor b = reduce_set(ps, Reduction::kMean).output;
    for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(Activations, ValuesSymmetryAndBackward) {
  EXPECT_EQ(sigmoid(0), 0.5);
  EXPECT_EQ(tanh_forward(Tensor::vector({0}))[0], 0.0);
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-50, 50);
    EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-12);
  }
  EXPECT_TRUE(std::isfinite(sigmoid(-1000)));
  EXPECT_TRUE(std::isfinite(sigmoid(1000)));

  Tensor x = random_tensor({6}, rng), up = random_tensor({6}, rng);
  Tensor dt = tanh_backward(tanh_forward(x), up);
  Tensor ds = sigmoid_backward(sigmoid_forward(x), up);
  auto ft = [&] { return probe(tanh_forward(x), up); };
  auto fs = [&] { return probe(sigmoid_forward(x), up); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(dt[i], numeric_partial(ft, x, i), 1e-8);
    EXPECT_NEAR(ds[i], numeric_partial(fs, x, i), 1e-8);
  }
}

TEST(Bce, AnalyticValuesAndStableLimits) {
  EXPECT_EQ(bce_with_logit(0, 1).loss, std::log(2.0));
  EXPECT_EQ(bce_with_logit(0, 0).loss, std::log(2.0));
  EXPECT_NEAR(bce_with_logit(100, 1).loss, 0, 1e-40);
  EXPECT_NEAR(bce_with_logit(-100, 1).loss, 100, 1e-12);
  EXPECT_DOUBLE_EQ(bce_with_logit(0, 1).dlogit, -0.5);
  for (double z : {-3.0, -0.2, 0.7, 4.0}) {
    for (int y : {0, 1}) {
      const double h = 1e-6;
      const double fd =
          (bce_with_logit(z + h, y).loss - bce_with_logit(z - h, y).loss) / (2 * h);
      EXPECT_NEAR(bce_with_logit(z, y).dlogit, fd, 1e-8);
    }
  }
}

TEST(Adam, FirstStepByHand) {
  Tensor p = Tensor::vector({0.0});
  p.enable_grad();
  p.grad()[0] = 1.0;
  AdamState s = AdamState::zeros_like(p);
  adam_step(p, s, AdamHyper{});
  // m_hat = 1, v_hat = 1, step = lr * 1 / (1 + eps)
  EXPECT_NEAR(p[0], -0.01 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p[0], -0.00999999999, 1e-10);
  EXPECT_EQ(s.t, 1u);
  EXPECT_EQ(p.grad()[0], 1.0);  // left intact
}

TEST(Adam, ZeroGradAndDeterminism) {
  Tensor p = Tensor::vector({0.3, -0.2});
  p.enable_grad();
  AdamState s = AdamState::zeros_like(p);
  adam_step(p, s, AdamHyper{});
  EXPECT_EQ(p, Tensor::vector({0.3, -0.2}));

  Tensor a = Tensor::vector({1, 2}), b = Tensor::vector({1, 2});
  a.enable_grad();
  b.enable_grad();
  AdamState sa = AdamState::zeros_like(a), sb = AdamState::zeros_like(b);
  for (int step = 0; step < 5; ++step) {
    a.grad()[0] = b.grad()[0] = 0.3 * step - 0.5;
    a.grad()[1] = b.grad()[1] = 0.1;
    adam_step(a, sa, AdamHyper{});
    adam_step(b, sb, AdamHyper{});
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa.m, sb.m);
  EXPECT_EQ(sa.v, sb.v);
  for (double v : sa.v) EXPECT_GE(v, 0.0);
}

TEST(Adam, MissingGradIsContractViolation) {
  Tensor p = Tensor::vector({1});
  AdamState s = AdamState::zeros_like(p);
  EXPECT_THROW(adam_step(p, s, AdamHyper{}), ContractViolation);
}

TEST(Gradcheck, QuadraticIsExact) {
  Tensor theta = Tensor::vector({3.0});
  std::vector<ParamRef> params = {{"theta", &theta}};
  ScalarFn f = [&](bool backward) {
    if (backward) theta.grad()[0] += 2 * theta[0];
    return theta[0] * theta[0];
  };
  GradcheckReport r = finite_diff_gradcheck(f, params, {1e-5, 64, 0});
  EXPECT_LT(r.max_rel_error, 1e-8);
  EXPECT_EQ(theta[0], 3.0);
}

TEST(Gradcheck, DetectsWrongGradientAndNonFiniteLoss) {
  Tensor theta = Tensor::vector({3.0});
  std::vector<ParamRef> params = {{"theta", &theta}};
  ScalarFn wrong = [&](bool backward) {
    if (backward) theta.grad()[0] -= 2 * theta[0];
    return theta[0] * theta[0];
  };
  EXPECT_GT(finite_diff_gradcheck(wrong, params).max_rel_error, 1e-2);
  ScalarFn nan = [&](bool) { return std::nan(""); };
  EXPECT_THROW(finite_diff_gradcheck(nan, params), NumericError);
}

TEST(Rng, ReproducibleAndStreamsDiffer) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Rng base(42);
  EXPECT_NE(base.derive(1).next_u64(), base.derive(2).next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.uniform_int(7), 7u);
  }
}

}  // namespace
}  // namespace setscore
