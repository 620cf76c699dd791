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

#include "cmix/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "cmix/errors.hpp"

namespace cmix {
namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FeatureExtractor::Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
  }
};

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

FeatureExtractor::FeatureExtractor(const FeatureConfig& config)
    : config_(config) {
  if (config.sample_rate <= 0 || !(config.window_ms > 0.0) ||
      !(config.hop_ms > 0.0) || config.mel_filters == 0 ||
      !(config.log_floor > 0.0)) {
    throw ConfigError("invalid feature configuration");
  }
  window_ = static_cast<std::size_t>(
      std::lround(config.window_ms * 1e-3 * config.sample_rate));
  hop_ = static_cast<std::size_t>(
      std::lround(config.hop_ms * 1e-3 * config.sample_rate));
  if (window_ < 2 || hop_ == 0) throw ConfigError("window or hop too short");
  fft_size_ = 1;
  while (fft_size_ < window_) fft_size_ <<= 1;

  hann_.resize(window_);
  for (std::size_t i = 0; i < window_; ++i) {
    hann_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                    static_cast<double>(i) /
                                    static_cast<double>(window_ - 1));
  }

  const std::size_t bins = fft_size_ / 2 + 1;
  const double nyquist = config.sample_rate / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  const std::size_t f = config.mel_filters;
  std::vector<double> edges_hz(f + 2);
  for (std::size_t i = 0; i < f + 2; ++i) {
    edges_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                            static_cast<double>(f + 1));
  }
  const double bin_hz = static_cast<double>(config.sample_rate) /
                        static_cast<double>(fft_size_);
  filters_.assign(f, std::vector<double>(bins, 0.0));
  filter_first_bin_.assign(f, bins);
  filter_last_bin_.assign(f, 0);
  centers_hz_.resize(f);
  for (std::size_t m = 0; m < f; ++m) {
    const double lo = edges_hz[m], mid = edges_hz[m + 1], hi = edges_hz[m + 2];
    centers_hz_[m] = mid;
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (hz > lo && hz <= mid) {
        w = (hz - lo) / (mid - lo);
      } else if (hz > mid && hz < hi) {
        w = (hi - hz) / (hi - mid);
      }
      if (w > 0.0) {
        filters_[m][k] = w;
        filter_first_bin_[m] = std::min(filter_first_bin_[m], k);
        filter_last_bin_[m] = std::max(filter_last_bin_[m], k);
      }
    }
  }

  plan_ = std::make_shared<Plan>();
  std::lock_guard lock(planner_mutex());
  double* in = fftw_alloc_real(fft_size_);
  fftw_complex* out = fftw_alloc_complex(bins);
  plan_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(fft_size_), in, out,
                                     FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (!plan_->plan) throw ConfigError("FFT planning failed");
}

std::size_t FeatureExtractor::frame_count(std::size_t n_samples) const {
  if (n_samples < window_) return 0;
  return (n_samples - window_) / hop_ + 1;
}

double FeatureExtractor::filter_center_hz(std::size_t m) const {
  return centers_hz_.at(m);
}

std::span<const double> FeatureExtractor::filter_weights(std::size_t m) const {
  return filters_.at(m);
}

Tensor FeatureExtractor::extract(std::span<const double> segment) const {
  const std::size_t frames = frame_count(segment.size());
  if (frames == 0) {
    throw ContractError("extract_features: segment of " +
                        std::to_string(segment.size()) +
                        " samples is shorter than one " +
                        std::to_string(window_) + "-sample window");
  }
  const std::size_t bins = fft_size_ / 2 + 1;
  const std::size_t f = config_.mel_filters;
  Tensor out = Tensor::zeros({frames, f});
  double* in = fftw_alloc_real(fft_size_);
  fftw_complex* spec = fftw_alloc_complex(bins);
  std::vector<double> magnitude(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* frame = segment.data() + t * hop_;
    for (std::size_t i = 0; i < window_; ++i) in[i] = frame[i] * hann_[i];
    for (std::size_t i = window_; i < fft_size_; ++i) in[i] = 0.0;
    fftw_execute_dft_r2c(plan_->plan, in, spec);
    for (std::size_t k = 0; k < bins; ++k) {
      magnitude[k] = std::sqrt(spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1]);
    }
    for (std::size_t m = 0; m < f; ++m) {
      double energy = 0.0;
      for (std::size_t k = filter_first_bin_[m]; k <= filter_last_bin_[m] &&
                                                 k < bins;
           ++k) {
        energy += filters_[m][k] * magnitude[k];
      }
      out.at(t, m) = std::log(std::max(energy, config_.log_floor));
    }
  }
  fftw_free(in);
  fftw_free(spec);
  return out;
}

}  // namespace cmix
