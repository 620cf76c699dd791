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

#ifndef CMIX_EVALUATION_HPP_
#define CMIX_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmix/data.hpp"
#include "cmix/encoder.hpp"
#include "cmix/features.hpp"
#include "cmix/random.hpp"

namespace cmix {

struct Trial {
  std::size_t enroll = 0;  // utterance index in the eval corpus
  std::size_t test = 0;
  bool is_target = false;
};

struct ScoreSet {
  std::vector<double> scores;
  std::vector<bool> labels;  // true = target
};

struct ErrorRates {
  double eer = 0.0;
  double threshold = 0.0;
  // Candidate thresholds in ascending order: -inf, each distinct score, +inf.
  std::vector<double> thresholds;
  std::vector<double> far;
  std::vector<double> frr;
};

// Start offsets (in samples) of `n_crops` crops of `crop` samples spread
// evenly over [0, length - crop]: floor(k * (length - crop) / (n - 1)).
std::vector<std::size_t> crop_offsets(std::size_t length, std::size_t crop,
                                      std::size_t n_crops);

// Crops of `crop_seconds`. An utterance shorter than one crop is tiled by
// repetition and a single crop is returned.
std::vector<std::vector<double>> crop_segments(const Utterance& utterance,
                                               double crop_seconds,
                                               std::size_t n_crops);

// Mean raw cosine similarity over all enroll x test crop pairs.
double score_trial(std::span<const std::vector<double>> enroll,
                   std::span<const std::vector<double>> test);

// Threshold sweep: FAR(t) = share of nontargets with score >= t, FRR(t) =
// share of targets with score < t. EER = (FAR + FRR) / 2 at the threshold
// minimizing |FAR - FRR|, lowest threshold on ties.
ErrorRates compute_eer(const ScoreSet& scores);

// Samples target and nontarget utterance pairs uniformly without
// replacement (unordered pairs, enroll index < test index).
std::vector<Trial> build_trials(const Corpus& eval, std::size_t n_target,
                                std::size_t n_nontarget, Rng& rng);

struct EvalConfig {
  double crop_seconds = 4.0;
  std::size_t n_crops = 10;
  std::size_t n_target = 500;
  std::size_t n_nontarget = 500;
  std::uint64_t seed = 0;
};

struct EvaluationResult {
  std::vector<Trial> trials;
  ScoreSet scores;
  ErrorRates rates;
};

// Per-crop embeddings of one utterance (volume-normalized before feature
// extraction, as in training).
std::vector<std::vector<double>> embed_crops(const Utterance& utterance,
                                             const EncoderParams& params,
                                             const EncoderConfig& encoder,
                                             const FeatureExtractor& features,
                                             const EvalConfig& config);

EvaluationResult evaluate_trials(const EncoderParams& params,
                                 const EncoderConfig& encoder,
                                 const FeatureConfig& features,
                                 const Corpus& eval,
                                 const std::vector<Trial>& trials,
                                 const EvalConfig& config);

// Builds the trial list from config.seed, then scores it.
EvaluationResult evaluate(const EncoderParams& params,
                          const EncoderConfig& encoder,
                          const FeatureConfig& features, const Corpus& eval,
                          const EvalConfig& config);

}  // namespace cmix

#endif  // CMIX_EVALUATION_HPP_
