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

#ifndef CMIX_FEATURES_HPP_
#define CMIX_FEATURES_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cmix/tensor.hpp"

namespace cmix {

struct FeatureConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t mel_filters = 40;
  double log_floor = 1e-10;
};

double hz_to_mel(double hz);  // 2595 * log10(1 + hz / 700)
double mel_to_hz(double mel);

// Log mel spectrogram: Hann-windowed frames, magnitude DFT, triangular mel
// filters evenly spaced on the mel scale from 0 Hz to Nyquist, natural log
// floored at `log_floor`. Thread-safe for concurrent extract() calls.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureConfig& config);

  const FeatureConfig& config() const { return config_; }
  std::size_t window_samples() const { return window_; }
  std::size_t hop_samples() const { return hop_; }
  std::size_t fft_size() const { return fft_size_; }
  // floor((n - window) / hop) + 1; zero when n < window.
  std::size_t frame_count(std::size_t n_samples) const;

  // Center frequency in Hz of filter `m`.
  double filter_center_hz(std::size_t m) const;
  // Filter weights over the fft_size / 2 + 1 magnitude bins.
  std::span<const double> filter_weights(std::size_t m) const;

  // T x F matrix. Throws ContractError if the segment is shorter than a
  // window.
  Tensor extract(std::span<const double> segment) const;

 private:
  struct Plan;

  FeatureConfig config_;
  std::size_t window_ = 0;
  std::size_t hop_ = 0;
  std::size_t fft_size_ = 0;
  std::vector<double> hann_;
  std::vector<std::vector<double>> filters_;
  std::vector<std::size_t> filter_first_bin_;
  std::vector<std::size_t> filter_last_bin_;
  std::vector<double> centers_hz_;
  std::shared_ptr<Plan> plan_;
};

}  // namespace cmix

#endif  // CMIX_FEATURES_HPP_
