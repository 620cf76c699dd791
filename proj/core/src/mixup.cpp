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

#include "cmix/mixup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmix/errors.hpp"

namespace cmix {

MixLevel parse_mix_level(const std::string& name) {
  if (name == "waveform") return MixLevel::kWaveform;
  if (name == "feature") return MixLevel::kFeature;
  throw ConfigError("unknown mixup level '" + name +
                    "' (expected waveform or feature)");
}

std::string to_string(MixLevel level) {
  return level == MixLevel::kWaveform ? "waveform" : "feature";
}

double sample_lambda(const MixupConfig& config, Rng& rng) {
  if (!(config.alpha > 0.0) || !std::isfinite(config.alpha)) {
    throw ConfigError("mixup.alpha must be a positive number");
  }
  std::gamma_distribution<double> gamma(config.alpha, 1.0);
  for (;;) {
    const double x = gamma(rng);
    const double y = gamma(rng);
    // Both draws can underflow to zero for very small alpha.
    if (x + y > 0.0) return x / (x + y);
  }
}

std::vector<std::size_t> sample_shuffle(std::size_t n, Rng& rng) {
  if (n < 2) throw ContractError("sample_shuffle: need at least 2 speakers");
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  // Explicit Fisher-Yates so the stream does not depend on std::shuffle.
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(p[i], p[pick(rng)]);
  }
  return p;
}

double rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

std::vector<double> normalize_volume(std::span<const double> waveform) {
  const double r = rms(waveform);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw NumericError("normalize_volume: waveform is silent or non-finite");
  }
  std::vector<double> out(waveform.begin(), waveform.end());
  for (double& s : out) s /= r;
  return out;
}

std::vector<double> mix_pair(std::span<const double> a,
                             std::span<const double> b, double lambda) {
  if (a.size() != b.size()) throw ContractError("mix_pair: length mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = lambda * a[i] + (1.0 - lambda) * b[i];
  }
  return out;
}

MixResult mix_inputs(const Rows& queries, const MixupConfig& config, Rng& rng) {
  MixResult result;
  const std::size_t n = queries.size();
  for (const auto& row : queries) {
    if (row.size() != queries.front().size()) {
      throw ContractError("mix_inputs: query rows differ in length");
    }
  }
  if (!config.enabled) {
    result.mixed_inputs = queries;
    result.lambda = 1.0;
    result.shuffle.resize(n);
    std::iota(result.shuffle.begin(), result.shuffle.end(), std::size_t{0});
    return result;
  }
  result.lambda = sample_lambda(config, rng);
  result.shuffle = sample_shuffle(n, rng);
  Rows source;
  if (config.level == MixLevel::kWaveform) {
    source.reserve(n);
    for (const auto& row : queries) source.push_back(normalize_volume(row));
  }
  const Rows& in = config.level == MixLevel::kWaveform ? source : queries;
  result.mixed_inputs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.mixed_inputs.push_back(
        mix_pair(in[i], in[result.shuffle[i]], result.lambda));
  }
  return result;
}

std::vector<double> add_noise(std::span<const double> signal, double snr_db,
                              Rng& rng) {
  std::vector<double> out(signal.begin(), signal.end());
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  const double noise_rms = rms(signal) * std::pow(10.0, -snr_db / 20.0);
  std::normal_distribution<double> normal(0.0, noise_rms);
  for (double& s : out) s += normal(rng);
  return out;
}

std::vector<double> apply_fir(std::span<const double> signal,
                              std::span<const double> taps) {
  std::vector<double> out(signal.size(), 0.0);
  for (std::size_t n = 0; n < signal.size(); ++n) {
    const std::size_t kmax = std::min(taps.size(), n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) acc += taps[k] * signal[n - k];
    out[n] = acc;
  }
  return out;
}

std::vector<double> random_reverb_taps(std::size_t length, Rng& rng) {
  std::vector<double> taps(length, 0.0);
  if (length == 0) return taps;
  taps[0] = 1.0;
  const double decay = static_cast<double>(length) / 4.0;
  std::normal_distribution<double> normal(0.0, 0.5);
  for (std::size_t k = 1; k < length; ++k) {
    taps[k] = normal(rng) * std::exp(-static_cast<double>(k) / decay);
  }
  return taps;
}

std::vector<double> augment(std::span<const double> waveform,
                            const AugmentConfig& config, Rng& rng) {
  if (config.snr_min_db > config.snr_max_db) {
    throw ConfigError("aug.snr_min_db exceeds aug.snr_max_db");
  }
  std::vector<double> x = normalize_volume(waveform);
  if (!config.enabled) return x;
  double snr = config.snr_min_db;
  if (std::isfinite(config.snr_min_db) && std::isfinite(config.snr_max_db)) {
    std::uniform_real_distribution<double> pick(config.snr_min_db,
                                                config.snr_max_db);
    snr = config.snr_min_db == config.snr_max_db ? config.snr_min_db
                                                 : pick(rng);
  }
  x = add_noise(x, snr, rng);
  if (config.reverb_taps > 0) {
    x = apply_fir(x, random_reverb_taps(config.reverb_taps, rng));
  }
  return normalize_volume(x);
}

}  // namespace cmix
