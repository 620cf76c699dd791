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

#include "cmix/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cmix/errors.hpp"
#include "cmix/mixup.hpp"

namespace cmix {
namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("score: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw NumericError("score: zero-norm embedding");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Uniform sample of `k` distinct indices from [0, n) (partial Fisher-Yates
// over an explicit index array).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::vector<std::size_t> crop_offsets(std::size_t length, std::size_t crop,
                                      std::size_t n_crops) {
  if (n_crops == 0) throw ContractError("crop_offsets: need n_crops >= 1");
  if (length < crop) return {0};
  const std::size_t span = length - crop;
  std::vector<std::size_t> out(n_crops, 0);
  if (n_crops == 1) return out;
  // floor(k * span / (n - 1)) without overflowing k * span.
  const std::size_t q = span / (n_crops - 1), r = span % (n_crops - 1);
  for (std::size_t k = 0; k < n_crops; ++k) {
    out[k] = k * q + (k * r) / (n_crops - 1);
  }
  return out;
}

std::vector<std::vector<double>> crop_segments(const Utterance& utterance,
                                               double crop_seconds,
                                               std::size_t n_crops) {
  if (n_crops == 0) throw ContractError("crop_segments: need n_crops >= 1");
  if (utterance.samples.empty()) {
    throw ContractError("crop_segments: empty utterance " + utterance.id);
  }
  const std::size_t crop = segment_samples(crop_seconds, utterance.sample_rate);
  const auto& s = utterance.samples;
  if (s.size() < crop) {
    std::vector<double> tiled(crop);
    for (std::size_t i = 0; i < crop; ++i) tiled[i] = s[i % s.size()];
    return {std::move(tiled)};
  }
  std::vector<std::vector<double>> out;
  for (std::size_t off : crop_offsets(s.size(), crop, n_crops)) {
    out.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(off),
                     s.begin() + static_cast<std::ptrdiff_t>(off + crop));
  }
  return out;
}

double score_trial(std::span<const std::vector<double>> enroll,
                   std::span<const std::vector<double>> test) {
  if (enroll.empty() || test.empty()) {
    throw ContractError("score_trial: empty embedding list");
  }
  double acc = 0.0;
  for (const auto& a : enroll)
    for (const auto& b : test) acc += cosine(a, b);
  return acc / static_cast<double>(enroll.size() * test.size());
}

ErrorRates compute_eer(const ScoreSet& set) {
  if (set.scores.size() != set.labels.size()) {
    throw ContractError("compute_eer: scores and labels differ in length");
  }
  std::vector<double> targets, nontargets;
  for (std::size_t i = 0; i < set.scores.size(); ++i) {
    if (!std::isfinite(set.scores[i])) {
      throw NumericError("compute_eer: non-finite score at trial " +
                         std::to_string(i));
    }
    (set.labels[i] ? targets : nontargets).push_back(set.scores[i]);
  }
  if (targets.empty() || nontargets.empty()) {
    throw ContractError("compute_eer: need at least one target and one "
                        "nontarget trial");
  }
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());
  std::vector<double> distinct = set.scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const double inf = std::numeric_limits<double>::infinity();
  ErrorRates out;
  out.thresholds.push_back(-inf);
  out.thresholds.insert(out.thresholds.end(), distinct.begin(), distinct.end());
  out.thresholds.push_back(inf);
  const double nt = static_cast<double>(targets.size());
  const double nn = static_cast<double>(nontargets.size());
  // Two pointers: targets below t, nontargets below t.
  std::size_t t_below = 0, n_below = 0;
  double best_gap = inf;
  for (double thr : out.thresholds) {
    while (t_below < targets.size() && targets[t_below] < thr) ++t_below;
    while (n_below < nontargets.size() && nontargets[n_below] < thr) ++n_below;
    const double far = static_cast<double>(nontargets.size() - n_below) / nn;
    const double frr = static_cast<double>(t_below) / nt;
    out.far.push_back(far);
    out.frr.push_back(frr);
    const double gap = std::abs(far - frr);
    if (gap < best_gap) {
      best_gap = gap;
      out.eer = (far + frr) / 2.0;
      out.threshold = thr;
    }
  }
  return out;
}

std::vector<Trial> build_trials(const Corpus& eval, std::size_t n_target,
                                std::size_t n_nontarget, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> same, cross;
  const auto& u = eval.utterances;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      (u[i].speaker_id == u[j].speaker_id ? same : cross).emplace_back(i, j);
  if (eval.speaker_count() < 2 || same.empty()) {
    throw ContractError("build_trials: eval corpus needs >= 2 speakers with "
                        ">= 2 utterances");
  }
  if (n_target > same.size() || n_nontarget > cross.size()) {
    throw ContractError("build_trials: requested " + std::to_string(n_target) +
                        " target / " + std::to_string(n_nontarget) +
                        " nontarget pairs but only " +
                        std::to_string(same.size()) + " / " +
                        std::to_string(cross.size()) + " exist");
  }
  std::vector<Trial> trials;
  for (std::size_t k : sample_indices(same.size(), n_target, rng)) {
    trials.push_back({same[k].first, same[k].second, true});
  }
  for (std::size_t k : sample_indices(cross.size(), n_nontarget, rng)) {
    trials.push_back({cross[k].first, cross[k].second, false});
  }
  return trials;
}

std::vector<std::vector<double>> embed_crops(const Utterance& utterance,
                                             const EncoderParams& params,
                                             const EncoderConfig& encoder,
                                             const FeatureExtractor& features,
                                             const EvalConfig& config) {
  std::vector<std::vector<double>> out;
  for (const auto& crop : crop_segments(utterance, config.crop_seconds,
                                        config.n_crops)) {
    const Tensor frames = features.extract(normalize_volume(crop));
    out.push_back(encode(frames, params, encoder).values);
  }
  return out;
}

EvaluationResult evaluate_trials(const EncoderParams& params,
                                 const EncoderConfig& encoder,
                                 const FeatureConfig& feature_config,
                                 const Corpus& eval,
                                 const std::vector<Trial>& trials,
                                 const EvalConfig& config) {
  const FeatureExtractor features(feature_config);
  std::map<std::size_t, std::vector<std::vector<double>>> cache;
  auto embeddings = [&](std::size_t idx) -> const auto& {
    auto it = cache.find(idx);
    if (it == cache.end()) {
      it = cache.emplace(idx, embed_crops(eval.utterances.at(idx), params,
                                          encoder, features, config))
               .first;
    }
    return it->second;
  };
  EvaluationResult result;
  result.trials = trials;
  for (const Trial& t : trials) {
    if (t.enroll == t.test) {
      throw ContractError("evaluate: trial enrolls and tests the same utterance");
    }
    result.scores.scores.push_back(score_trial(embeddings(t.enroll),
                                               embeddings(t.test)));
    result.scores.labels.push_back(t.is_target);
  }
  result.rates = compute_eer(result.scores);
  return result;
}

EvaluationResult evaluate(const EncoderParams& params,
                          const EncoderConfig& encoder,
                          const FeatureConfig& features, const Corpus& eval,
                          const EvalConfig& config) {
  Rng rng(derive_seed(config.seed, {5}));
  const auto trials = build_trials(eval, config.n_target, config.n_nontarget, rng);
  return evaluate_trials(params, encoder, features, eval, trials, config);
}

}  // namespace cmix
