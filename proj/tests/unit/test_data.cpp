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
#include <filesystem>
#include <fstream>
#include <set>

#include "cmix/data.hpp"
#include "cmix/errors.hpp"
#include "cmix/features.hpp"
#include "cmix/mixup.hpp"
#include "cmix/wav.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cmix_test_data_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Hand-built PCM16 mono WAV with the given sample values.
void write_raw_wav(const fs::path& path, const std::vector<std::int16_t>& pcm,
                   std::uint16_t format = 1, std::uint16_t channels = 1) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) out.put(static_cast<char>(v >> (8 * i))); };
  auto u16 = [&](std::uint16_t v) { for (int i = 0; i < 2; ++i) out.put(static_cast<char>(v >> (8 * i))); };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVEfmt ", 8);
  u32(16);
  u16(format);
  u16(channels);
  u32(16000);
  u32(16000 * 2 * channels);
  u16(static_cast<std::uint16_t>(2 * channels));
  u16(16);
  out.write("data", 4);
  u32(data_bytes);
  for (std::int16_t v : pcm) u16(static_cast<std::uint16_t>(v));
}

cmix::Corpus small_corpus(std::size_t speakers, std::size_t utts, double seconds,
                          std::uint64_t seed) {
  cmix::SyntheticCorpusConfig c;
  c.n_speakers = speakers;
  c.utterances_per_speaker = utts;
  c.utterance_seconds = seconds;
  c.segment_seconds = seconds / 2.0;
  cmix::Rng rng(seed);
  return cmix::generate_synthetic_corpus(c, rng);
}

std::vector<double> mean_logmel(const cmix::FeatureExtractor& fx,
                                const std::vector<double>& samples) {
  // Unit-RMS input, as the training pipeline sees it.
  const cmix::Tensor t = fx.extract(cmix::normalize_volume(samples));
  std::vector<double> m(t.cols(), 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[c] += t.at(r, c) / static_cast<double>(t.rows());
  return m;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("PCM16 extremes map to -1 and 32767/32768") {
  const fs::path dir = scratch("pcm");
  write_raw_wav(dir / "x.wav", {-32768, 32767, 0, 16384});
  const cmix::WavData w = cmix::read_wav(dir / "x.wav");
  CHECK(w.sample_rate == 16000);
  REQUIRE(w.samples.size() == 4);
  CHECK(w.samples[0] == -1.0);
  CHECK(w.samples[1] == 32767.0 / 32768.0);
  CHECK(w.samples[2] == 0.0);
  CHECK(w.samples[3] == 0.5);
}

TEST_CASE("unsupported WAV encodings are format errors") {
  const fs::path dir = scratch("fmt");
  write_raw_wav(dir / "float.wav", {1, 2}, 3, 1);
  write_raw_wav(dir / "stereo.wav", {1, 2}, 1, 2);
  std::ofstream(dir / "junk.wav") << "not a wav";
  CHECK_THROWS_AS(cmix::read_wav(dir / "float.wav"), cmix::FormatError);
  CHECK_THROWS_AS(cmix::read_wav(dir / "stereo.wav"), cmix::FormatError);
  CHECK_THROWS_AS(cmix::read_wav(dir / "junk.wav"), cmix::FormatError);
}

TEST_CASE("WAV write and read round-trip to PCM16 precision") {
  const fs::path dir = scratch("rt");
  const std::vector<double> x = {0.0, 0.25, -0.5, 0.999, -1.0, 0.123456};
  cmix::write_wav(dir / "a.wav", x, 8000);
  const auto w = cmix::read_wav(dir / "a.wav");
  CHECK(w.sample_rate == 8000);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(w.samples[i] - x[i]) <= 0.5 / 32768.0);
}

TEST_CASE("manifest loading resolves relative paths and reports bad lines") {
  const fs::path dir = scratch("manifest");
  fs::create_directories(dir / "a");
  for (int i = 0; i < 2; ++i) {
    write_raw_wav(dir / "a" / ("u" + std::to_string(i) + ".wav"), {100, -200, 300});
    write_raw_wav(dir / ("b" + std::to_string(i) + ".wav"), {1000, 2000});
  }
  std::ofstream(dir / "m.tsv") << "# header\nspkA\ta/u0.wav\nspkA\ta/u1.wav\n\nspkB\tb0.wav\nspkB\tb1.wav\n";
  const cmix::Corpus c = cmix::load_manifest(dir / "m.tsv");
  CHECK(c.utterances.size() == 4);
  CHECK(c.speaker_count() == 2);
  for (const auto& u : c.utterances)
    for (double s : u.samples) CHECK((s >= -1.0 && s <= 1.0));

  std::ofstream(dir / "bad.tsv") << "spkA\ta/u0.wav\nno tab here\n";
  try {
    cmix::load_manifest(dir / "bad.tsv");
    FAIL("expected a parse error");
  } catch (const cmix::ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::ofstream(dir / "empty.tsv") << "";
  const cmix::Corpus empty = cmix::load_manifest(dir / "empty.tsv");
  CHECK(empty.utterances.empty());
  CHECK_FALSE(cmix::validate_corpus(empty, 2, 16000).warnings.empty());
}

TEST_CASE("validation excludes speakers with too few utterances") {
  cmix::Corpus c = small_corpus(3, 2, 0.2, 1);
  c.utterances.pop_back();
  const auto v = cmix::validate_corpus(c, 2, 16000);
  REQUIRE(v.excluded_speakers.size() == 1);
  CHECK(v.excluded_speakers[0] == "spk0002");
  CHECK(cmix::validate_corpus(c, 2, 8000).warnings.size() >= 2);
  cmix::BatchSpec spec{2, 2, 0.1};
  CHECK(cmix::eligible_speakers(c, spec).size() == 2);
}

TEST_CASE("written corpora load back with identical labels") {
  const fs::path dir = scratch("write");
  const cmix::Corpus c = small_corpus(2, 3, 0.1, 2);
  cmix::write_corpus(c, dir, "manifest.tsv");
  const cmix::Corpus back = cmix::load_manifest(dir / "manifest.tsv");
  REQUIRE(back.utterances.size() == c.utterances.size());
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    CHECK(back.utterances[i].speaker_id == c.utterances[i].speaker_id);
    CHECK(back.utterances[i].samples.size() == c.utterances[i].samples.size());
  }
}

TEST_CASE("synthetic corpora are deterministic and well formed") {
  const cmix::Corpus a = small_corpus(3, 2, 0.5, 3), b = small_corpus(3, 2, 0.5, 3);
  REQUIRE(a.utterances.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(a.utterances[i].samples == b.utterances[i].samples);
  CHECK(a.utterances[0].id == "spk0000_000");
  for (const auto& u : a.utterances) {
    CHECK(u.samples.size() == 8000);
    double peak = 0.0;
    for (double s : u.samples) peak = std::max(peak, std::abs(s));
    CHECK(peak < 1.0);
  }
  cmix::SyntheticCorpusConfig bad;
  bad.n_speakers = 1;
  cmix::Rng rng(1);
  CHECK_THROWS_AS(cmix::generate_synthetic_corpus(bad, rng), cmix::ConfigError);
  bad.n_speakers = 2;
  bad.utterance_seconds = 3.0;
  CHECK_THROWS_AS(cmix::generate_synthetic_corpus(bad, rng), cmix::ConfigError);
  bad.utterance_seconds = 4.0;
  bad.difficulty = 1.5;
  CHECK_THROWS_AS(cmix::generate_synthetic_corpus(bad, rng), cmix::ConfigError);
}

TEST_CASE("speaker profiles respect their ranges") {
  cmix::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto p = cmix::sample_speaker_profile(0.5, rng);
    CHECK(p.fundamental_hz >= 80.0);
    CHECK(p.fundamental_hz <= 300.0);
    CHECK(p.harmonic_amps.size() == cmix::kSyntheticHarmonics);
    bool nonzero = false;
    for (double a : p.harmonic_amps) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      nonzero = nonzero || a > 0.0;
    }
    CHECK(nonzero);
    CHECK(p.jitter_std >= 0.0);
  }
}

TEST_CASE("100 Hz and 200 Hz speakers are separated by their energy spectra") {
  cmix::SpeakerProfileParams lo, hi;
  lo.fundamental_hz = 100.0;
  hi.fundamental_hz = 200.0;
  lo.harmonic_amps = hi.harmonic_amps = std::vector<double>(12, 0.5);
  lo.filter_coeffs = hi.filter_coeffs = {1.0};
  cmix::Rng rng(5);
  std::vector<std::vector<double>> spectra;
  std::vector<int> labels;
  for (int rep = 0; rep < 4; ++rep) {
    for (int s = 0; s < 2; ++s) {
      const auto x = cmix::synthesize_utterance(s ? hi : lo, 1600, 16000, 0.0, rng);
      auto mag = oracle::dft_magnitude(x, 1600);
      double norm = 0.0;
      for (double m : mag) norm += m * m;
      for (double& m : mag) m /= std::sqrt(norm);
      spectra.push_back(mag);
      labels.push_back(s);
    }
  }
  // Nearest centroid using the first two repetitions as templates.
  std::vector<double> c0(spectra[0].size()), c1(spectra[0].size());
  for (std::size_t k = 0; k < c0.size(); ++k) {
    c0[k] = (spectra[0][k] + spectra[2][k]) / 2;
    c1[k] = (spectra[1][k] + spectra[3][k]) / 2;
  }
  for (std::size_t i = 4; i < spectra.size(); ++i) {
    const int guess = sq_dist(spectra[i], c0) < sq_dist(spectra[i], c1) ? 0 : 1;
    CHECK(guess == labels[i]);
  }
}

TEST_CASE("mean log-mel nearest centroid beats 70 percent at difficulty 0.5") {
  cmix::SyntheticCorpusConfig c;
  c.n_speakers = 50;
  c.utterances_per_speaker = 10;
  c.difficulty = 0.5;
  cmix::Rng rng(6);
  const cmix::Corpus corpus = cmix::generate_synthetic_corpus(c, rng);
  const cmix::FeatureExtractor fx(cmix::FeatureConfig{});
  std::vector<std::vector<double>> feats;
  for (const auto& u : corpus.utterances) feats.push_back(mean_logmel(fx, u.samples));
  // Centroids from the first five utterances, tested on the last five.
  std::vector<std::vector<double>> cent(50, std::vector<double>(40, 0.0));
  for (std::size_t s = 0; s < 50; ++s)
    for (std::size_t u = 0; u < 5; ++u)
      for (std::size_t f = 0; f < 40; ++f) cent[s][f] += feats[s * 10 + u][f] / 5.0;
  int correct = 0;
  for (std::size_t s = 0; s < 50; ++s) {
    for (std::size_t u = 5; u < 10; ++u) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < 50; ++k)
        if (sq_dist(feats[s * 10 + u], cent[k]) < sq_dist(feats[s * 10 + u], cent[best])) best = k;
      correct += best == s;
    }
  }
  const double accuracy = correct / 250.0;
  MESSAGE("nearest-centroid accuracy: ", accuracy);
  CHECK(accuracy > 0.70);
}

TEST_CASE("downsampling keeps exactly k utterances and drops short speakers") {
  cmix::Corpus c = small_corpus(4, 5, 0.1, 7);
  c.utterances.erase(c.utterances.begin() + 15, c.utterances.begin() + 18);
  cmix::Rng r1(1), r2(1);
  const auto a = cmix::downsample_corpus(c, 3, r1);
  const auto b = cmix::downsample_corpus(c, 3, r2);
  CHECK(a.corpus.utterances.size() == 9);
  REQUIRE(a.dropped_speakers.size() == 1);
  CHECK(a.dropped_speakers[0] == "spk0003");
  for (std::size_t i = 0; i < 9; ++i) CHECK(a.corpus.utterances[i].id == b.corpus.utterances[i].id);
  for (const auto& [spk, idx] : a.corpus.by_speaker()) CHECK(idx.size() == 3);
  const auto full = cmix::downsample_corpus(c, 5, r1);
  CHECK(full.corpus.utterances.size() == 15);
  CHECK_THROWS_AS(cmix::downsample_corpus(c, 1, r1), cmix::ContractError);
}

TEST_CASE("batches use distinct speakers and utterances and stay in bounds") {
  const cmix::Corpus c = small_corpus(5, 4, 0.2, 8);
  cmix::Rng rng(9);
  const cmix::BatchSpec spec{3, 3, 0.05};
  for (int i = 0; i < 50; ++i) {
    const cmix::Batch b = cmix::sample_batch(c, spec, rng);
    CHECK(std::set<std::string>(b.speaker_ids.begin(), b.speaker_ids.end()).size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      std::set<std::size_t> utts;
      for (std::size_t m = 0; m < 3; ++m) {
        const std::size_t k = j * 3 + m;
        utts.insert(b.utterance_index[k]);
        CHECK(c.utterances[b.utterance_index[k]].speaker_id == b.speaker_ids[j]);
        CHECK(b.segments[k].size() == 800);
        CHECK(b.offsets[k] + 800 <= c.utterances[b.utterance_index[k]].samples.size());
      }
      CHECK(utts.size() == 3);
    }
  }
  CHECK_THROWS_AS(cmix::sample_batch(c, {6, 2, 0.05}, rng), cmix::ContractError);
}

TEST_CASE("a corpus of exactly N x M full-length utterances is used whole") {
  const cmix::Corpus c = small_corpus(2, 2, 0.1, 10);
  cmix::Rng rng(11);
  const cmix::Batch b = cmix::sample_batch(c, {2, 2, 0.1}, rng);
  std::set<std::size_t> used(b.utterance_index.begin(), b.utterance_index.end());
  CHECK(used.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(b.offsets[k] == 0);
    CHECK(b.segments[k] == c.utterances[b.utterance_index[k]].samples);
  }
}

TEST_CASE("speaker frequencies across batches stay within binomial bounds") {
  const std::size_t speakers = 12, n = 4, draws = 10000;
  const cmix::Corpus c = small_corpus(speakers, 2, 0.02, 12);
  cmix::Rng rng(13);
  std::map<std::string, double> count;
  for (std::size_t i = 0; i < draws; ++i)
    for (const auto& s : cmix::sample_batch(c, {n, 2, 0.01}, rng).speaker_ids) count[s] += 1;
  const double p = static_cast<double>(n) / speakers;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [s, k] : count) CHECK(std::abs(k - draws * p) <= 3 * sigma);
}

TEST_CASE("segment length is the rounded product of seconds and rate") {
  CHECK(cmix::segment_samples(2.0, 16000) == 32000);
  CHECK(cmix::segment_samples(0.00003125, 16000) == 1);
  CHECK(cmix::segment_samples(1.0 / 3.0, 16000) == 5333);
}

TEST_CASE("overlapping train and eval speakers are rejected") {
  cmix::Corpus train = small_corpus(2, 2, 0.1, 14);
  cmix::Corpus eval = small_corpus(2, 2, 0.1, 15);
  CHECK_THROWS_AS(cmix::check_disjoint_speakers(train, eval), cmix::ContractError);
  for (auto& u : eval.utterances) u.speaker_id = "evl" + u.speaker_id;
  CHECK_NOTHROW(cmix::check_disjoint_speakers(train, eval));
}
