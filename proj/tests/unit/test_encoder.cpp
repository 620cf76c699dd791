// Copyright 2026 The cmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "cmix/encoder.hpp"
#include "cmix/errors.hpp"
#include "cmix/gradcheck.hpp"
#include "cmix/losses.hpp"
#include "cmix/ops.hpp"
#include "doctest.h"

using cmix::Tensor;

namespace {

Tensor random_frames(std::size_t t, std::size_t f, std::uint64_t seed) {
  cmix::Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor x = Tensor::zeros({t, f});
  for (double& v : x.values) v = n(rng);
  return x;
}

cmix::EncoderConfig tiny(cmix::Pooling pooling, cmix::Activation act) {
  cmix::EncoderConfig c;
  c.input_dim = 3;
  c.hidden_dims = {4, 3};
  c.embedding_dim = 2;
  c.pooling = pooling;
  c.activation = act;
  return c;
}

}  // namespace

TEST_CASE("parameters are laid out in declaration order") {
  cmix::EncoderConfig c;
  cmix::Rng rng(1);
  const cmix::EncoderParams p = cmix::init_params(c, rng);
  // 40x64 + 64 + 64x64 + 64 + 64x64 + 64 + 64 + 64x32 + 32 + 1 + 1
  CHECK(p.parameter_count() == 2560 + 64 + 4096 + 64 + 4096 + 64 + 64 + 2048 + 32 + 2);
  const auto flat = p.flatten();
  CHECK(flat.size() == p.parameter_count());
  CHECK(flat[0] == p.layer_weights[0].values[0]);
  CHECK(flat[flat.size() - 2] == cmix::kInitialSimilarityScale);
  CHECK(flat.back() == cmix::kInitialSimilarityBias);
  cmix::EncoderParams q = p;
  std::vector<double> shifted = flat;
  for (double& v : shifted) v += 1.0;
  q.assign(shifted);
  CHECK(q.flatten() == shifted);
  CHECK_THROWS_AS(q.assign(std::vector<double>(3)), cmix::ContractError);
}

TEST_CASE("glorot initialization stays within its bound and biases start at zero") {
  cmix::EncoderConfig c;
  cmix::Rng rng(2);
  const cmix::EncoderParams p = cmix::init_params(c, rng);
  const double bound = std::sqrt(6.0 / (40 + 64));
  for (double v : p.layer_weights[0].values) CHECK(std::abs(v) <= bound);
  for (double v : p.layer_biases[0].values) CHECK(v == 0.0);
  for (double v : p.output_bias.values) CHECK(v == 0.0);
}

TEST_CASE("invalid encoder configs are rejected") {
  cmix::EncoderConfig c;
  c.hidden_dims = {};
  CHECK_THROWS_AS(c.validate(), cmix::ConfigError);
  c.hidden_dims = {8, 0};
  CHECK_THROWS_AS(c.validate(), cmix::ConfigError);
  c.hidden_dims = {8};
  c.embedding_dim = 1;
  CHECK_THROWS_AS(c.validate(), cmix::ConfigError);
  CHECK_THROWS_AS(cmix::parse_pooling("max"), cmix::ConfigError);
  CHECK_THROWS_AS(cmix::parse_activation("gelu"), cmix::ConfigError);
}

TEST_CASE("encode produces one D-vector and rejects mismatched features") {
  cmix::EncoderConfig c;
  cmix::Rng rng(3);
  const auto p = cmix::init_params(c, rng);
  const Tensor e = cmix::encode(random_frames(50, 40, 4), p, c);
  CHECK(e.rows() == 1);
  CHECK(e.cols() == 32);
  CHECK_THROWS_AS(cmix::encode(random_frames(50, 39, 4), p, c), cmix::ContractError);
}

TEST_CASE("SAP weights are a distribution over frames") {
  cmix::EncoderConfig c;
  cmix::Rng rng(5);
  const auto p = cmix::init_params(c, rng);
  const Tensor a = cmix::sap_attention(random_frames(30, 40, 6), p, c);
  CHECK(a.rows() == 30);
  double s = 0.0;
  for (double v : a.values) {
    CHECK(v > 0.0);
    s += v;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean pooling of identical frames equals the single-frame embedding") {
  auto c = tiny(cmix::Pooling::kMean, cmix::Activation::kTanh);
  cmix::Rng rng(7);
  const auto p = cmix::init_params(c, rng);
  const Tensor one = random_frames(1, 3, 8);
  Tensor many = Tensor::zeros({5, 3});
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t f = 0; f < 3; ++f) many.at(t, f) = one.at(0, f);
  const Tensor a = cmix::encode(one, p, c), b = cmix::encode(many, p, c);
  for (std::size_t i = 0; i < 2; ++i) CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-14));
}

TEST_CASE("batched encoding matches per-utterance encoding") {
  cmix::EncoderConfig c;
  cmix::Rng rng(9);
  const auto p = cmix::init_params(c, rng);
  const Tensor a = random_frames(20, 40, 10), b = random_frames(20, 40, 11);
  Tensor ab = Tensor::zeros({40, 40});
  std::copy(a.values.begin(), a.values.end(), ab.values.begin());
  std::copy(b.values.begin(), b.values.end(), ab.values.begin() + 800);
  cmix::Graph g;
  const auto enc = cmix::bind(g, p, false);
  const Tensor both = cmix::encode_batch(enc, c, g.constant(ab), 20).value();
  const Tensor ea = cmix::encode(a, p, c), eb = cmix::encode(b, p, c);
  for (std::size_t d = 0; d < 32; ++d) {
    CHECK(both.at(0, d) == doctest::Approx(ea.values[d]).epsilon(1e-12));
    CHECK(both.at(1, d) == doctest::Approx(eb.values[d]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cmix::encode_batch(enc, c, g.constant(ab), 7), cmix::ContractError);
}

TEST_CASE("encoder parameter gradients match finite differences") {
  for (auto pooling : {cmix::Pooling::kMean, cmix::Pooling::kSap}) {
    for (auto act : {cmix::Activation::kTanh, cmix::Activation::kRelu}) {
      const auto c = tiny(pooling, act);
      cmix::Rng rng(12);
      cmix::EncoderParams p = cmix::init_params(c, rng);
      // Nonzero biases so every path is active.
      for (Tensor* t : p.tensors())
        for (double& v : t->values) v += 0.05;
      const Tensor frames = random_frames(12, 3, 13);  // 4 items x 3 frames
      const std::vector<std::size_t> shuffle = {1, 0};
      auto loss_of = [&](const cmix::EncoderParams& params, cmix::Graph& g,
                         cmix::BoundEncoder& enc) {
        enc = cmix::bind(g, params, true);
        const cmix::Var e = cmix::encode_batch(enc, c, g.constant(frames), 3);
        // Items 0,1 are supports of speakers 0,1; items 2,3 their queries.
        const cmix::Var centroids = cmix::ops::slice_rows(e, 0, 2);
        const cmix::Var queries = cmix::ops::slice_rows(e, 2, 2);
        const cmix::Var s = cmix::compute_similarity_matrix(queries, centroids, enc.similarity);
        return cmix::batch_loss(cmix::LossKind::kContrastiveMixup, s, shuffle, 0.6);
      };
      cmix::Graph g;
      cmix::BoundEncoder enc;
      g.backward(loss_of(p, g, enc));
      std::vector<double> analytic;
      for (const auto& leaf : enc.leaves) analytic.insert(analytic.end(), leaf.grad().begin(), leaf.grad().end());
      const auto numeric = cmix::finite_difference_gradient(
          [&](std::span<const double> flat) {
            cmix::EncoderParams q = p;
            q.assign(flat);
            cmix::Graph g2;
            cmix::BoundEncoder e2;
            return loss_of(q, g2, e2).value().item();
          },
          p.flatten(), 1e-6);
      const auto cmp = cmix::compare_gradients(analytic, numeric, 1e-4, 1e-7);
      CAPTURE(cmix::to_string(pooling));
      CAPTURE(cmix::to_string(act));
      CHECK_MESSAGE(cmp.ok, "max rel ", cmp.max_rel_error);
    }
  }
}
