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

#ifndef CMIX_EXPERIMENT_HPP_
#define CMIX_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cmix/data.hpp"
#include "cmix/evaluation.hpp"
#include "cmix/trainer.hpp"

namespace cmix {

// baseline: AP loss. mixup: contrastive-mixup loss with mixed queries.
// aug / mixup_aug: the same with noise + reverb augmentation.
enum class Arm { kBaseline, kMixup, kAug, kMixupAug };

Arm parse_arm(const std::string& name);
std::string to_string(Arm arm);

// Training configuration of `arm` derived from a shared base.
TrainConfig configure_arm(TrainConfig base, Arm arm);

struct ExperimentConfig {
  std::vector<Arm> arms = {Arm::kBaseline, Arm::kMixup, Arm::kAug,
                           Arm::kMixupAug};
  std::vector<std::size_t> utterances_per_speaker = {2, 3, 5, 10};
  std::size_t seeds = 3;
  std::uint64_t base_seed = 1;
  TrainConfig train;
  EvalConfig eval;
  // Optional Beta alpha per sweep point; falls back to train.mixup.alpha.
  std::map<std::size_t, double> alpha_by_utterances;
};

struct CellResult {
  Arm arm = Arm::kBaseline;
  std::size_t utterances_per_speaker = 0;
  std::size_t seed_index = 0;
  bool ok = false;
  double eer = 0.0;  // fraction
  std::string error;
};

struct ArmSummary {
  Arm arm = Arm::kBaseline;
  std::size_t utterances_per_speaker = 0;
  std::size_t completed = 0;
  double mean_eer = 0.0;
  double std_eer = 0.0;  // sample std; 0 with a single seed
  bool single_seed = false;
  std::optional<double> relative_improvement;  // vs baseline, fraction
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::vector<ArmSummary> summaries;

  const ArmSummary* find(Arm arm, std::size_t utterances_per_speaker) const;
};

// (baseline - arm) / baseline.
double relative_improvement(double baseline, double arm);
double mean_of(std::span<const double> xs);
// Bessel-corrected; 0 for fewer than two values.
double sample_std(std::span<const double> xs);

// Seed shared by every arm at one (sweep point, seed index), so arms see the
// same downsampled data and batch order.
std::uint64_t cell_seed(std::uint64_t base, std::size_t utterances_per_speaker,
                        std::size_t seed_index);

// Downsample the training pool, train, evaluate. Failures are captured in
// the result rather than thrown.
CellResult run_cell(const ExperimentConfig& config, const Corpus& train_pool,
                    const Corpus& eval, Arm arm,
                    std::size_t utterances_per_speaker, std::size_t seed_index);

std::vector<ArmSummary> summarize(const std::vector<CellResult>& cells);

using CellCallback = std::function<void(const CellResult&)>;

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const Corpus& train_pool, const Corpus& eval,
                                const CellCallback& on_cell = {});

// Columns: arm, utterances_per_speaker, seed, eer_percent, mean_eer_percent,
// std_eer_percent, relative_improvement_percent. One row per cell; group
// statistics repeat on each row of the group. Failed cells print "failed".
void write_report_csv(const ExperimentReport& report, std::ostream& out);

}  // namespace cmix

#endif  // CMIX_EXPERIMENT_HPP_
