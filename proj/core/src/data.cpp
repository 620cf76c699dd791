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

#include "cmix/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "cmix/errors.hpp"
#include "cmix/mixup.hpp"
#include "cmix/wav.hpp"

namespace cmix {

std::map<std::string, std::vector<std::size_t>> Corpus::by_speaker() const {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    out[utterances[i].speaker_id].push_back(i);
  }
  return out;
}

void check_disjoint_speakers(const Corpus& train, const Corpus& eval) {
  std::set<std::string> train_speakers;
  for (const auto& u : train.utterances) train_speakers.insert(u.speaker_id);
  for (const auto& u : eval.utterances) {
    if (train_speakers.count(u.speaker_id)) {
      throw ContractError("speaker '" + u.speaker_id +
                          "' appears in both the train and eval splits");
    }
  }
}

SpeakerProfileParams sample_speaker_profile(double difficulty, Rng& rng) {
  SpeakerProfileParams p;
  std::uniform_real_distribution<double> f0(80.0, 300.0);
  std::uniform_real_distribution<double> amp(0.1, 1.0);
  std::normal_distribution<double> tap(0.0, 0.5);
  p.fundamental_hz = f0(rng);
  p.harmonic_amps.resize(kSyntheticHarmonics);
  for (double& a : p.harmonic_amps) a = amp(rng);
  p.filter_coeffs.resize(5);
  p.filter_coeffs[0] = 1.0;
  for (std::size_t k = 1; k < p.filter_coeffs.size(); ++k) {
    p.filter_coeffs[k] = tap(rng);
  }
  p.jitter_std = 0.16 * difficulty;
  return p;
}

std::vector<double> synthesize_utterance(const SpeakerProfileParams& profile,
                                         std::size_t n_samples, int sample_rate,
                                         double difficulty, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> gain_dist(0.5, 2.0);
  std::normal_distribution<double> jitter(0.0, profile.jitter_std);
  const double gain = gain_dist(rng);
  const double f0 = profile.fundamental_hz * (1.0 + jitter(rng));
  const double nyquist = sample_rate / 2.0;
  std::vector<double> clean(n_samples, 0.0);
  for (std::size_t h = 0; h < profile.harmonic_amps.size(); ++h) {
    const double freq = f0 * static_cast<double>(h + 1);
    const double ph = phase(rng);
    if (freq >= 0.95 * nyquist) continue;
    const double w = 2.0 * std::numbers::pi * freq / sample_rate;
    const double a = gain * profile.harmonic_amps[h];
    // sin(w n + ph) by the two-term recurrence s[n] = 2 cos(w) s[n-1] - s[n-2].
    const double c2 = 2.0 * std::cos(w);
    double prev = std::sin(ph - w), cur = std::sin(ph);
    for (std::size_t n = 0; n < n_samples; ++n) {
      clean[n] += a * cur;
      const double next = c2 * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  std::vector<double> out = apply_fir(clean, profile.filter_coeffs);
  if (difficulty > 0.0) {
    std::normal_distribution<double> noise(0.0, difficulty * rms(out));
    for (double& s : out) s += noise(rng);
  }
  // Keep the PCM16 round trip free of clipping.
  double peak = 0.0;
  for (double s : out) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    const double limit = 0.5 * gain / 2.0;
    for (double& s : out) s *= limit / peak;
  }
  return out;
}

Corpus generate_synthetic_corpus(const SyntheticCorpusConfig& config, Rng& rng) {
  if (config.n_speakers < 2) {
    throw ConfigError("synthetic corpus needs at least 2 speakers");
  }
  if (!(config.difficulty >= 0.0 && config.difficulty <= 1.0)) {
    throw ConfigError("data.difficulty must lie in [0, 1]");
  }
  if (config.utterance_seconds < 2.0 * config.segment_seconds) {
    throw ConfigError("utterance_seconds must be at least twice the segment "
                      "length");
  }
  const std::size_t n_samples = segment_samples(config.utterance_seconds,
                                                config.sample_rate);
  Corpus corpus;
  corpus.split = config.split;
  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    const SpeakerProfileParams profile =
        sample_speaker_profile(config.difficulty, rng);
    std::ostringstream sid;
    sid << config.speaker_prefix << std::setw(4) << std::setfill('0') << s;
    for (std::size_t u = 0; u < config.utterances_per_speaker; ++u) {
      Utterance utt;
      utt.speaker_id = sid.str();
      std::ostringstream uid;
      uid << utt.speaker_id << "_" << std::setw(3) << std::setfill('0') << u;
      utt.id = uid.str();
      utt.sample_rate = config.sample_rate;
      utt.samples = synthesize_utterance(profile, n_samples, config.sample_rate,
                                         config.difficulty, rng);
      corpus.utterances.push_back(std::move(utt));
    }
  }
  return corpus;
}

ValidationSummary validate_corpus(const Corpus& corpus,
                                  std::size_t min_utterances,
                                  int expected_sample_rate) {
  ValidationSummary summary;
  if (corpus.utterances.empty()) {
    summary.warnings.push_back("corpus is empty");
    return summary;
  }
  for (const auto& u : corpus.utterances) {
    if (u.sample_rate != expected_sample_rate) {
      summary.warnings.push_back("utterance " + u.id + " has sample rate " +
                                 std::to_string(u.sample_rate) + ", expected " +
                                 std::to_string(expected_sample_rate));
    }
  }
  for (const auto& [speaker, idx] : corpus.by_speaker()) {
    if (idx.size() < min_utterances) {
      summary.excluded_speakers.push_back(speaker);
      summary.warnings.push_back("speaker " + speaker + " has " +
                                 std::to_string(idx.size()) +
                                 " utterances (< " +
                                 std::to_string(min_utterances) +
                                 "); excluded from batch sampling");
    }
  }
  return summary;
}

Corpus load_manifest(const std::filesystem::path& manifest_path, Split split) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw ParseError("cannot open manifest " + manifest_path.string(), 0);
  }
  const std::filesystem::path base = manifest_path.parent_path();
  Corpus corpus;
  corpus.split = split;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("manifest " + manifest_path.string() +
                           ": expected 'speaker_id<TAB>path'",
                       line_no);
    }
    Utterance utt;
    utt.speaker_id = line.substr(0, tab);
    const std::filesystem::path rel = line.substr(tab + 1);
    utt.id = rel.stem().string();
    WavData wav = read_wav(base / rel);
    if (wav.samples.empty()) {
      throw FormatError("empty audio in " + (base / rel).string());
    }
    utt.sample_rate = wav.sample_rate;
    utt.samples = std::move(wav.samples);
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                  const std::string& manifest_name) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / manifest_name, std::ios::binary);
  if (!manifest) {
    throw FormatError("cannot write manifest in " + dir.string());
  }
  for (const auto& u : corpus.utterances) {
    const std::filesystem::path rel =
        std::filesystem::path(u.speaker_id) / (u.id + ".wav");
    std::filesystem::create_directories(dir / u.speaker_id);
    write_wav(dir / rel, u.samples, u.sample_rate);
    manifest << u.speaker_id << '\t' << rel.generic_string() << '\n';
  }
}

DownsampleResult downsample_corpus(const Corpus& corpus,
                                   std::size_t utterances_per_speaker,
                                   Rng& rng) {
  if (utterances_per_speaker < 2) {
    throw ContractError("downsample_corpus: need at least 2 utterances per "
                        "speaker");
  }
  DownsampleResult result;
  result.corpus.split = corpus.split;
  for (const auto& [speaker, idx] : corpus.by_speaker()) {
    if (idx.size() < utterances_per_speaker) {
      result.dropped_speakers.push_back(speaker);
      continue;
    }
    // Partial Fisher-Yates over this speaker's indices, then restore corpus
    // order among the chosen ones.
    std::vector<std::size_t> pool = idx;
    for (std::size_t i = 0; i < utterances_per_speaker; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(utterances_per_speaker);
    std::sort(pool.begin(), pool.end());
    for (std::size_t i : pool) result.corpus.utterances.push_back(corpus.utterances[i]);
  }
  return result;
}

std::size_t segment_samples(double segment_seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(segment_seconds * sample_rate));
}

std::vector<std::string> eligible_speakers(const Corpus& corpus,
                                           const BatchSpec& spec) {
  std::vector<std::string> out;
  for (const auto& [speaker, idx] : corpus.by_speaker()) {
    std::size_t usable = 0;
    for (std::size_t i : idx) {
      const auto& u = corpus.utterances[i];
      if (u.samples.size() >= segment_samples(spec.segment_seconds, u.sample_rate)) {
        ++usable;
      }
    }
    if (usable >= spec.utterances_per_speaker) out.push_back(speaker);
  }
  return out;
}

Batch sample_batch(const Corpus& corpus, const BatchSpec& spec, Rng& rng) {
  const std::size_t n = spec.speakers_per_batch, m = spec.utterances_per_speaker;
  if (n < 2 || m < 2) {
    throw ContractError("sample_batch: need N >= 2 and M >= 2");
  }
  const auto groups = corpus.by_speaker();
  std::vector<std::string> eligible = eligible_speakers(corpus, spec);
  if (eligible.size() < n) {
    throw ContractError("sample_batch: only " + std::to_string(eligible.size()) +
                        " eligible speakers for N=" + std::to_string(n));
  }
  Batch batch;
  batch.speakers = n;
  batch.utterances_per_speaker = m;
  for (std::size_t j = 0; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, eligible.size() - 1);
    std::swap(eligible[j], eligible[pick(rng)]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::string& speaker = eligible[j];
    std::vector<std::size_t> pool;
    for (std::size_t i : groups.at(speaker)) {
      const auto& u = corpus.utterances[i];
      if (u.samples.size() >= segment_samples(spec.segment_seconds, u.sample_rate)) {
        pool.push_back(i);
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    batch.speaker_ids.push_back(speaker);
    for (std::size_t i = 0; i < m; ++i) {
      const Utterance& u = corpus.utterances[pool[i]];
      const std::size_t len = segment_samples(spec.segment_seconds, u.sample_rate);
      std::uniform_int_distribution<std::size_t> offset(0, u.samples.size() - len);
      const std::size_t start = offset(rng);
      batch.utterance_index.push_back(pool[i]);
      batch.offsets.push_back(start);
      batch.segments.emplace_back(
          u.samples.begin() + static_cast<std::ptrdiff_t>(start),
          u.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
    }
  }
  return batch;
}

}  // namespace cmix
