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

#ifndef CMIX_MIXUP_HPP_
#define CMIX_MIXUP_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cmix/random.hpp"

namespace cmix {

enum class MixLevel { kWaveform, kFeature };

MixLevel parse_mix_level(const std::string& name);
std::string to_string(MixLevel level);

struct MixupConfig {
  bool enabled = false;
  double alpha = 0.4;  // Beta(alpha, alpha)
  MixLevel level = MixLevel::kWaveform;
  std::uint64_t rng_seed = 0;
};

// Additive white noise at a uniformly drawn SNR followed by an optional
// synthetic decaying reverb tail.
struct AugmentConfig {
  bool enabled = false;
  double snr_min_db = 5.0;
  double snr_max_db = 20.0;
  std::size_t reverb_taps = 0;  // 0 disables reverb
};

// Row-per-query matrix; all rows have equal length.
using Rows = std::vector<std::vector<double>>;

struct MixResult {
  Rows mixed_inputs;
  double lambda = 1.0;
  std::vector<std::size_t> shuffle;
};

// One draw from Beta(alpha, alpha). Throws ConfigError if alpha <= 0.
double sample_lambda(const MixupConfig& config, Rng& rng);

// Uniform permutation of 0..n-1; fixed points are allowed.
std::vector<std::size_t> sample_shuffle(std::size_t n, Rng& rng);

double rms(std::span<const double> samples);

// Scales to unit RMS. Throws NumericError on an all-zero or empty input.
std::vector<double> normalize_volume(std::span<const double> waveform);

// lambda * a + (1 - lambda) * b.
std::vector<double> mix_pair(std::span<const double> a,
                             std::span<const double> b, double lambda);

// Mixes query rows with a shuffled copy of themselves. At waveform level each
// row is volume-normalized before interpolation; at feature level rows are
// interpolated as given. Disabled configs pass the rows through with
// lambda = 1 and the identity shuffle, drawing nothing from `rng`.
MixResult mix_inputs(const Rows& queries, const MixupConfig& config, Rng& rng);

// Returns signal + white Gaussian noise whose RMS is rms(signal) *
// 10^(-snr_db / 20). An infinite SNR returns the signal unchanged.
std::vector<double> add_noise(std::span<const double> signal, double snr_db,
                              Rng& rng);

// Causal FIR filtering truncated to the input length.
std::vector<double> apply_fir(std::span<const double> signal,
                              std::span<const double> taps);

// Unit first tap followed by exponentially decaying Gaussian taps.
std::vector<double> random_reverb_taps(std::size_t length, Rng& rng);

// Normalize, add noise at an SNR ~ U[snr_min_db, snr_max_db], reverberate if
// configured, renormalize to unit RMS. A disabled config only normalizes.
std::vector<double> augment(std::span<const double> waveform,
                            const AugmentConfig& config, Rng& rng);

}  // namespace cmix

#endif  // CMIX_MIXUP_HPP_
