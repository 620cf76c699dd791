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

#include <benchmark/benchmark.h>

#include <random>

#include "cmix/data.hpp"
#include "cmix/encoder.hpp"
#include "cmix/features.hpp"
#include "cmix/losses.hpp"
#include "cmix/mixup.hpp"
#include "cmix/random.hpp"
#include "cmix/trainer.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  cmix::Rng rng(seed);
  std::normal_distribution<double> d(0.0, 0.1);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

void BM_ExtractFeatures(benchmark::State& state) {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  const auto audio = noise(static_cast<std::size_t>(state.range(0)) * 16000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fx.extract(audio));
}
BENCHMARK(BM_ExtractFeatures)->Arg(2)->Arg(4);

void BM_EncodeCrop(benchmark::State& state) {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  const cmix::Tensor frames = fx.extract(noise(4 * 16000, 2));
  cmix::EncoderConfig config;
  cmix::Rng rng(3);
  const cmix::EncoderParams params = cmix::init_params(config, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cmix::encode(frames, params, config));
}
BENCHMARK(BM_EncodeCrop);

void BM_LossForwardBackward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0)), d = 32;
  cmix::Rng rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random = [&](std::size_t r) {
    cmix::Tensor t = cmix::Tensor::zeros({r, d});
    for (double& v : t.values) v = normal(rng);
    return t;
  };
  const cmix::Tensor support = random(n), query = random(n);
  const auto shuffle = cmix::sample_shuffle(n, rng);
  for (auto _ : state) {
    cmix::Graph g;
    cmix::Var s = g.leaf(support, true), q = g.leaf(query, true);
    cmix::Var w = g.leaf(cmix::Tensor::scalar(10.0), true);
    cmix::Var b = g.leaf(cmix::Tensor::scalar(-5.0), true);
    cmix::Var c = cmix::compute_centroids(s, n, 2);
    cmix::Var sim = cmix::compute_similarity_matrix(q, c, {w, b});
    cmix::Var loss = cmix::batch_loss(cmix::LossKind::kContrastiveMixup, sim, shuffle, 0.3);
    g.backward(loss);
    benchmark::DoNotOptimize(loss.value().item());
  }
}
BENCHMARK(BM_LossForwardBackward)->Arg(8)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  cmix::SyntheticCorpusConfig cc;
  cc.n_speakers = 8;
  cc.utterances_per_speaker = 2;
  cmix::Rng rng(5);
  const cmix::Corpus corpus = cmix::generate_synthetic_corpus(cc, rng);
  cmix::TrainConfig config;
  config.loss = cmix::LossKind::kContrastiveMixup;
  config.mixup.enabled = true;
  const cmix::FeatureExtractor fx(config.features);
  cmix::TrainStreams streams(config);
  const cmix::EncoderParams params = cmix::init_params(config.encoder, rng);
  const cmix::Batch batch = cmix::sample_batch(
      corpus, {config.speakers_per_batch, config.utterances_per_speaker,
               config.segment_seconds},
      rng);
  for (auto _ : state) {
    const cmix::PreparedBatch prepared = cmix::prepare_batch(batch, config, fx, streams);
    benchmark::DoNotOptimize(cmix::compute_step(prepared, params, config).loss);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
