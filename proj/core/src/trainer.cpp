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

#include "cmix/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmix/errors.hpp"
#include "cmix/ops.hpp"

namespace cmix {
namespace {

Tensor stack_frames(const std::vector<Tensor>& items) {
  const std::size_t cols = items.front().cols();
  std::size_t rows = 0;
  for (const Tensor& t : items) rows += t.rows();
  std::vector<double> vals;
  vals.reserve(rows * cols);
  for (const Tensor& t : items) vals.insert(vals.end(), t.values.begin(), t.values.end());
  return Tensor::matrix(rows, cols, std::move(vals));
}

}  // namespace

void TrainConfig::validate() const {
  if (speakers_per_batch < 2 || utterances_per_speaker < 2) {
    throw ConfigError("train.n and train.m must both be >= 2");
  }
  if (!(learning_rate >= 0.0)) throw ConfigError("train.lr must be >= 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0) || lr_decay_epochs == 0) {
    throw ConfigError("learning-rate decay must be in (0, 1] every >= 1 epochs");
  }
  if (epochs == 0 || batches_per_epoch == 0) {
    throw ConfigError("train.epochs and train.batches_per_epoch must be >= 1");
  }
  if (!(segment_seconds > 0.0)) throw ConfigError("segment length must be > 0");
  if (mixup.enabled && !(mixup.alpha > 0.0)) {
    throw ConfigError("mixup.alpha must be positive");
  }
  if (augment.snr_min_db > augment.snr_max_db) {
    throw ConfigError("aug.snr_min_db exceeds aug.snr_max_db");
  }
  if (encoder.input_dim != features.mel_filters) {
    throw ConfigError("encoder input_dim must equal data.mel_filters");
  }
  encoder.validate();
}

double learning_rate_at(const TrainConfig& config, std::size_t epoch) {
  return config.learning_rate *
         std::pow(config.lr_decay,
                  static_cast<double>(epoch / config.lr_decay_epochs));
}

TrainStreams::TrainStreams(const TrainConfig& config)
    : batches(derive_seed(config.seed, {2})),
      augmentation(derive_seed(config.seed, {3})),
      mixing(derive_seed(config.seed ^ config.mixup.rng_seed, {4})) {}

PreparedBatch prepare_batch(const Batch& batch, const TrainConfig& config,
                            const FeatureExtractor& features,
                            TrainStreams& streams) {
  const std::size_t n = batch.speakers, m = batch.utterances_per_speaker;
  // Augment (or just normalize) every segment first.
  std::vector<std::vector<double>> audio;
  audio.reserve(batch.segments.size());
  for (const auto& seg : batch.segments) {
    audio.push_back(augment(seg, config.augment, streams.augmentation));
  }

  Rows queries;
  for (std::size_t j = 0; j < n; ++j) queries.push_back(audio[j * m + m - 1]);

  PreparedBatch out;
  out.speakers = n;
  out.utterances_per_speaker = m;
  std::vector<Tensor> support;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i + 1 < m; ++i)
      support.push_back(features.extract(audio[j * m + i]));

  std::vector<Tensor> query;
  if (config.mixup.level == MixLevel::kWaveform || !config.mixup.enabled) {
    MixResult mixed = mix_inputs(queries, config.mixup, streams.mixing);
    out.lambda = mixed.lambda;
    out.shuffle = std::move(mixed.shuffle);
    for (const auto& row : mixed.mixed_inputs) query.push_back(features.extract(row));
  } else {
    Rows rows;
    for (const auto& q : queries) rows.push_back(features.extract(q).values);
    MixResult mixed = mix_inputs(rows, config.mixup, streams.mixing);
    out.lambda = mixed.lambda;
    out.shuffle = std::move(mixed.shuffle);
    const std::size_t t = support.front().rows(), f = support.front().cols();
    for (auto& row : mixed.mixed_inputs) {
      query.push_back(Tensor::matrix(t, f, std::move(row)));
    }
  }
  out.frames_per_segment = query.front().rows();
  out.support_frames = stack_frames(support);
  out.query_frames = stack_frames(query);
  return out;
}

StepResult compute_step(const PreparedBatch& batch, const EncoderParams& params,
                        const TrainConfig& config) {
  Graph g;
  BoundEncoder enc = bind(g, params, true);
  Var support_frames = g.constant(batch.support_frames);
  Var query_frames = g.constant(batch.query_frames);
  Var support = encode_batch(enc, config.encoder, support_frames,
                             batch.frames_per_segment);
  Var query = encode_batch(enc, config.encoder, query_frames,
                           batch.frames_per_segment);
  Var centroids = compute_centroids(support, batch.speakers,
                                    batch.utterances_per_speaker);
  Var s = compute_similarity_matrix(query, centroids, enc.similarity);
  Var loss = batch_loss(config.loss, s, batch.shuffle, batch.lambda);
  g.backward(loss);
  StepResult r;
  r.loss = loss.value().item();
  r.grads.reserve(params.parameter_count());
  for (const Var& leaf : enc.leaves) {
    auto gr = leaf.grad();
    r.grads.insert(r.grads.end(), gr.begin(), gr.end());
  }
  return r;
}

TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  const BatchCallback& on_batch) {
  config.validate();
  Rng init_rng(derive_seed(config.seed, {1}));
  return train_from(corpus, config, init_params(config.encoder, init_rng),
                    on_batch);
}

TrainResult train_from(const Corpus& corpus, const TrainConfig& config,
                       EncoderParams initial, const BatchCallback& on_batch) {
  config.validate();
  const FeatureExtractor features(config.features);
  const BatchSpec spec{config.speakers_per_batch, config.utterances_per_speaker,
                       config.segment_seconds};
  TrainStreams streams(config);
  TrainResult result;
  result.params = std::move(initial);
  std::vector<double> flat = result.params.flatten();
  AdamOptions opts;
  opts.learning_rate = config.learning_rate;
  AdamState adam(flat.size(), opts);
  const std::size_t scale_index = flat.size() - 2;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    adam.options.learning_rate = learning_rate_at(config, epoch);
    double total = 0.0;
    for (std::size_t b = 0; b < config.batches_per_epoch; ++b) {
      const Batch batch = sample_batch(corpus, spec, streams.batches);
      const PreparedBatch prepared =
          prepare_batch(batch, config, features, streams);
      StepResult step;
      try {
        step = compute_step(prepared, result.params, config);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(b) + ": " + e.what());
      }
      if (!std::isfinite(step.loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b));
      }
      adam_step(adam, flat, step.grads);
      flat[scale_index] = std::max(flat[scale_index], kMinSimilarityScale);
      result.params.assign(flat);
      total += step.loss;
      if (on_batch) on_batch(epoch, b, step.loss);
    }
    result.epoch_loss.push_back(total / static_cast<double>(config.batches_per_epoch));
    result.epoch_lr.push_back(adam.options.learning_rate);
  }
  return result;
}

}  // namespace cmix
