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
#include <numbers>
#include <random>

#include "cmix/errors.hpp"
#include "cmix/features.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace {

std::vector<double> tone(double hz, std::size_t n, int rate = 16000) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  return x;
}

}  // namespace

TEST_CASE("frame geometry follows the 25 ms window and 10 ms hop") {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  CHECK(fx.window_samples() == 400);
  CHECK(fx.hop_samples() == 160);
  CHECK(fx.fft_size() == 512);
  // Count window starts directly.
  std::size_t starts = 0;
  for (std::size_t s = 0; s + 400 <= 32000; s += 160) ++starts;
  CHECK(starts == 198);
  CHECK(fx.frame_count(32000) == starts);
  CHECK(fx.extract(std::vector<double>(32000, 0.1)).rows() == 198);
  CHECK(fx.frame_count(399) == 0);
  CHECK(fx.frame_count(400) == 1);
  CHECK_THROWS_AS(fx.extract(std::vector<double>(399, 0.1)), cmix::ContractError);
}

TEST_CASE("mel conversion follows 2595 log10(1 + f / 700)") {
  CHECK(cmix::hz_to_mel(0.0) == 0.0);
  CHECK(cmix::hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  for (double f : {50.0, 440.0, 3000.0, 8000.0}) {
    CHECK(cmix::mel_to_hz(cmix::hz_to_mel(f)) == doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("filter centers are evenly spaced in mel between 0 and Nyquist") {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  const double step = cmix::hz_to_mel(8000.0) / 41.0;
  for (std::size_t m = 0; m < 40; ++m) {
    CHECK(cmix::hz_to_mel(fx.filter_center_hz(m)) == doctest::Approx(step * (m + 1)).epsilon(1e-9));
    double peak = 0.0;
    for (double w : fx.filter_weights(m)) {
      CHECK(w >= 0.0);
      peak = std::max(peak, w);
    }
    CHECK(peak > 0.0);
    CHECK(peak <= 1.0);
  }
}

TEST_CASE("silence hits the log floor in every cell") {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  const cmix::Tensor t = fx.extract(std::vector<double>(4000, 0.0));
  for (double v : t.values) CHECK(v == doctest::Approx(std::log(1e-10)));
}

TEST_CASE("a tone at a filter center is dominated by that filter") {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  for (std::size_t m : {std::size_t{5}, std::size_t{15}, std::size_t{30}}) {
    const double hz = fx.filter_center_hz(m);
    const auto x = tone(hz, 400);
    // Independent check: the peak DFT bin of the windowed frame sits where
    // filter m has weight.
    std::vector<double> windowed(400);
    for (std::size_t i = 0; i < 400; ++i)
      windowed[i] = x[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / 399.0));
    const auto mag = oracle::dft_magnitude(windowed, 512);
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(mag.begin(), mag.end()) - mag.begin());
    CHECK(fx.filter_weights(m)[peak] > 0.0);
    const cmix::Tensor t = fx.extract(x);
    std::size_t best = 0;
    for (std::size_t f = 1; f < 40; ++f)
      if (t.at(0, f) > t.at(0, best)) best = f;
    CHECK(best == m);
  }
}

TEST_CASE("library magnitudes agree with a direct DFT") {
  // A single frame through one filter: sum_k w_k |X_k| must match.
  cmix::FeatureConfig cfg;
  cfg.mel_filters = 10;
  const cmix::FeatureExtractor fx(cfg);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(400);
  for (double& v : x) v = n(rng);
  std::vector<double> windowed(400);
  for (std::size_t i = 0; i < 400; ++i)
    windowed[i] = x[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / 399.0));
  const auto mag = oracle::dft_magnitude(windowed, 512);
  const cmix::Tensor t = fx.extract(x);
  for (std::size_t m = 0; m < 10; ++m) {
    double e = 0.0;
    const auto w = fx.filter_weights(m);
    for (std::size_t k = 0; k < mag.size(); ++k) e += w[k] * mag[k];
    CHECK(t.at(0, m) == doctest::Approx(std::log(std::max(e, 1e-10))).epsilon(1e-10));
  }
}

TEST_CASE("shifting the input by one hop shifts the frames by one") {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(8000);
  for (double& v : x) v = n(rng);
  const std::vector<double> shifted(x.begin() + 160, x.end());
  const cmix::Tensor a = fx.extract(x), b = fx.extract(shifted);
  REQUIRE(b.rows() + 1 == a.rows());
  for (std::size_t t = 0; t < b.rows(); ++t)
    for (std::size_t f = 0; f < 40; ++f) CHECK(std::abs(a.at(t + 1, f) - b.at(t, f)) <= 1e-9);
}

TEST_CASE("extraction is deterministic") {
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  const auto x = tone(300.0, 3000);
  CHECK(fx.extract(x).values == fx.extract(x).values);
}
