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

#ifndef CMIX_TRAINER_HPP_
#define CMIX_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "cmix/adam.hpp"
#include "cmix/data.hpp"
#include "cmix/encoder.hpp"
#include "cmix/features.hpp"
#include "cmix/losses.hpp"
#include "cmix/mixup.hpp"

namespace cmix {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batches_per_epoch = 50;
  std::size_t speakers_per_batch = 8;      // N
  std::size_t utterances_per_speaker = 2;  // M
  double segment_seconds = 2.0;
  double learning_rate = 1e-3;
  double lr_decay = 0.95;
  std::size_t lr_decay_epochs = 10;
  LossKind loss = LossKind::kAngularPrototypical;
  MixupConfig mixup;
  AugmentConfig augment;
  FeatureConfig features;
  EncoderConfig encoder;
  std::uint64_t seed = 0;

  void validate() const;
};

// lr0 * decay^floor(epoch / every), epochs counted from 0.
double learning_rate_at(const TrainConfig& config, std::size_t epoch);

// Model inputs for one batch after augmentation, volume normalization,
// mixing and feature extraction. Support features are never mixed.
struct PreparedBatch {
  std::size_t speakers = 0;
  std::size_t utterances_per_speaker = 0;
  std::size_t frames_per_segment = 0;
  Tensor support_frames;  // (N * (M - 1) * T) x F, speaker-major
  Tensor query_frames;    // (N * T) x F
  double lambda = 1.0;
  std::vector<std::size_t> shuffle;
};

// Streams that drive one training run.
struct TrainStreams {
  Rng batches;
  Rng augmentation;
  Rng mixing;

  explicit TrainStreams(const TrainConfig& config);
};

PreparedBatch prepare_batch(const Batch& batch, const TrainConfig& config,
                            const FeatureExtractor& features,
                            TrainStreams& streams);

struct StepResult {
  double loss = 0.0;
  std::vector<double> grads;  // flat, declaration order
};

// Forward and backward pass of the configured loss.
StepResult compute_step(const PreparedBatch& batch, const EncoderParams& params,
                        const TrainConfig& config);

struct TrainResult {
  EncoderParams params;
  std::vector<double> epoch_loss;  // mean over batches
  std::vector<double> epoch_lr;
};

// Optional per-batch callback (epoch, batch, loss).
using BatchCallback =
    std::function<void(std::size_t, std::size_t, double)>;

// Samples, prepares and optimizes batches_per_epoch batches per epoch with
// Adam, clamping the similarity scale after every step. A non-finite loss
// throws NumericError naming the epoch and batch.
TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  const BatchCallback& on_batch = {});

// Same, starting from the given parameters.
TrainResult train_from(const Corpus& corpus, const TrainConfig& config,
                       EncoderParams initial,
                       const BatchCallback& on_batch = {});

}  // namespace cmix

#endif  // CMIX_TRAINER_HPP_
