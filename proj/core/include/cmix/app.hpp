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

#ifndef CMIX_APP_HPP_
#define CMIX_APP_HPP_

#include <filesystem>
#include <ostream>
#include <string>

#include "cmix/config.hpp"
#include "cmix/data.hpp"
#include "cmix/evaluation.hpp"
#include "cmix/experiment.hpp"
#include "cmix/trainer.hpp"

// Typed views of a Config and the command implementations behind the CLI.
namespace cmix::app {

FeatureConfig feature_config(const Config& c);
EncoderConfig encoder_config(const Config& c);
MixupConfig mixup_config(const Config& c);
AugmentConfig augment_config(const Config& c);
TrainConfig train_config(const Config& c);
EvalConfig eval_config(const Config& c);
SyntheticCorpusConfig train_corpus_config(const Config& c);
SyntheticCorpusConfig eval_corpus_config(const Config& c);
ExperimentConfig experiment_config(const Config& c);

struct Corpora {
  Corpus train;
  Corpus eval;
};

// Loads data.manifest / data.eval_manifest when set, otherwise generates the
// synthetic splits from the config seed. Checks speaker disjointness and
// reports validation warnings to `log`.
Corpora load_corpora(const Config& c, std::ostream& log);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

// Writes train/ and eval/ WAV trees with manifest.tsv under `out_dir`.
int generate_data(const Config& c, const std::filesystem::path& out_dir,
                  std::ostream& log);

// Writes the checkpoint to `out` and the per-epoch loss trace to
// `out` + ".trace.csv".
int train(const Config& c, const std::filesystem::path& out, std::ostream& log);

// Scores the eval split with a checkpoint; writes per-trial scores to `out`
// and prints the EER.
int evaluate(const Config& c, const std::filesystem::path& checkpoint,
             const std::filesystem::path& out, std::ostream& log);

int experiment(const Config& c, const std::filesystem::path& out,
               std::ostream& log);

// Finite-difference check of every loss on random batches; writes a CSV
// summary to `out` when non-empty. Returns kExitNumeric on any mismatch.
int grad_check(const Config& c, const std::filesystem::path& out,
               std::ostream& log);

// Runs `fn`, mapping exceptions to exit codes and printing them to `err`.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn);

}  // namespace cmix::app

#include "cmix/app_impl.hpp"

#endif  // CMIX_APP_HPP_
