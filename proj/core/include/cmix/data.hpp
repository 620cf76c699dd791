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

#ifndef CMIX_DATA_HPP_
#define CMIX_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cmix/random.hpp"

namespace cmix {

struct Utterance {
  std::string id;
  std::string speaker_id;
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class Split { kTrain, kEval };

struct Corpus {
  std::vector<Utterance> utterances;
  Split split = Split::kTrain;

  // speaker id -> utterance indices, ordered by speaker id.
  std::map<std::string, std::vector<std::size_t>> by_speaker() const;
  std::size_t speaker_count() const { return by_speaker().size(); }
};

// Throws ContractError if any speaker appears in both corpora.
void check_disjoint_speakers(const Corpus& train, const Corpus& eval);

// Synthetic voice: harmonic source at `fundamental_hz` shaped by a short FIR.
struct SpeakerProfileParams {
  double fundamental_hz = 120.0;
  std::vector<double> harmonic_amps;
  std::vector<double> filter_coeffs;
  double jitter_std = 0.0;  // relative std of the per-utterance pitch offset
};

struct SyntheticCorpusConfig {
  std::size_t n_speakers = 10;
  std::size_t utterances_per_speaker = 10;
  double utterance_seconds = 4.0;
  int sample_rate = 16000;
  double difficulty = 0.0;        // in [0, 1]
  double segment_seconds = 2.0;   // utterances must hold two segments
  std::string speaker_prefix = "spk";
  Split split = Split::kTrain;
};

inline constexpr std::size_t kSyntheticHarmonics = 12;

SpeakerProfileParams sample_speaker_profile(double difficulty, Rng& rng);

// Renders one utterance of `profile`. Per-utterance variation: random
// harmonic phases, gain in [0.5, 2], relative pitch jitter and additive noise
// at RMS ratio `difficulty` to the clean signal.
std::vector<double> synthesize_utterance(const SpeakerProfileParams& profile,
                                         std::size_t n_samples, int sample_rate,
                                         double difficulty, Rng& rng);

// Deterministic given the engine state. Speaker ids are prefix + index.
Corpus generate_synthetic_corpus(const SyntheticCorpusConfig& config, Rng& rng);

struct ValidationSummary {
  std::vector<std::string> warnings;
  // Speakers with fewer than the required utterances; never sampled.
  std::vector<std::string> excluded_speakers;
};

// Speakers with fewer than `min_utterances` are reported as excluded; an
// empty corpus or a sample-rate mismatch produces a warning.
ValidationSummary validate_corpus(const Corpus& corpus,
                                  std::size_t min_utterances,
                                  int expected_sample_rate);

// Tab-separated "speaker_id<TAB>relative_wav_path" lines; blank lines and
// lines starting with '#' are skipped. Paths resolve against the manifest's
// directory.
Corpus load_manifest(const std::filesystem::path& manifest_path,
                     Split split = Split::kTrain);

// Writes every utterance as <dir>/<speaker>/<id>.wav plus the manifest.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                  const std::string& manifest_name);

struct DownsampleResult {
  Corpus corpus;
  std::vector<std::string> dropped_speakers;
};

// Keeps exactly `utterances_per_speaker` utterances per speaker chosen
// uniformly without replacement; speakers with fewer are dropped.
DownsampleResult downsample_corpus(const Corpus& corpus,
                                   std::size_t utterances_per_speaker,
                                   Rng& rng);

struct BatchSpec {
  std::size_t speakers_per_batch = 8;
  std::size_t utterances_per_speaker = 2;
  double segment_seconds = 2.0;
};

// N x M segments, speaker-major: segment (j, i) is segments[j * M + i]. The
// last utterance of each speaker (i = M - 1) is the query.
struct Batch {
  std::size_t speakers = 0;
  std::size_t utterances_per_speaker = 0;
  std::vector<std::string> speaker_ids;
  std::vector<std::size_t> utterance_index;
  std::vector<std::size_t> offsets;
  std::vector<std::vector<double>> segments;

  const std::vector<double>& segment(std::size_t j, std::size_t i) const {
    return segments[j * utterances_per_speaker + i];
  }
};

std::size_t segment_samples(double segment_seconds, int sample_rate);

// Speakers with at least M utterances that each hold a full segment.
std::vector<std::string> eligible_speakers(const Corpus& corpus,
                                           const BatchSpec& spec);

Batch sample_batch(const Corpus& corpus, const BatchSpec& spec, Rng& rng);

}  // namespace cmix

#endif  // CMIX_DATA_HPP_
