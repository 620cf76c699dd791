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

#include "cmix/experiment.hpp"

#include <cmath>
#include <cstdio>

#include "cmix/errors.hpp"

namespace cmix {
namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

Arm parse_arm(const std::string& name) {
  if (name == "baseline") return Arm::kBaseline;
  if (name == "mixup") return Arm::kMixup;
  if (name == "aug") return Arm::kAug;
  if (name == "mixup_aug") return Arm::kMixupAug;
  throw ConfigError("unknown experiment arm '" + name +
                    "' (expected baseline, mixup, aug or mixup_aug)");
}

std::string to_string(Arm arm) {
  switch (arm) {
    case Arm::kBaseline:
      return "baseline";
    case Arm::kMixup:
      return "mixup";
    case Arm::kAug:
      return "aug";
    case Arm::kMixupAug:
      return "mixup_aug";
  }
  return "?";
}

TrainConfig configure_arm(TrainConfig base, Arm arm) {
  const bool mix = arm == Arm::kMixup || arm == Arm::kMixupAug;
  const bool aug = arm == Arm::kAug || arm == Arm::kMixupAug;
  base.loss = mix ? LossKind::kContrastiveMixup : LossKind::kAngularPrototypical;
  base.mixup.enabled = mix;
  base.augment.enabled = aug;
  return base;
}

double relative_improvement(double baseline, double arm) {
  if (baseline == 0.0) {
    throw NumericError("relative improvement against a zero baseline");
  }
  return (baseline - arm) / baseline;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t utterances_per_speaker,
                        std::size_t seed_index) {
  return derive_seed(base, {utterances_per_speaker, seed_index});
}

const ArmSummary* ExperimentReport::find(Arm arm, std::size_t upk) const {
  for (const auto& s : summaries) {
    if (s.arm == arm && s.utterances_per_speaker == upk) return &s;
  }
  return nullptr;
}

CellResult run_cell(const ExperimentConfig& config, const Corpus& train_pool,
                    const Corpus& eval, Arm arm,
                    std::size_t utterances_per_speaker, std::size_t seed_index) {
  CellResult cell;
  cell.arm = arm;
  cell.utterances_per_speaker = utterances_per_speaker;
  cell.seed_index = seed_index;
  try {
    const std::uint64_t seed =
        cell_seed(config.base_seed, utterances_per_speaker, seed_index);
    Rng sampler(derive_seed(seed, {6}));
    const Corpus train_corpus =
        downsample_corpus(train_pool, utterances_per_speaker, sampler).corpus;
    TrainConfig tc = configure_arm(config.train, arm);
    tc.seed = seed;
    if (auto it = config.alpha_by_utterances.find(utterances_per_speaker);
        it != config.alpha_by_utterances.end()) {
      tc.mixup.alpha = it->second;
    }
    const TrainResult trained = train(train_corpus, tc);
    const EvaluationResult r =
        evaluate(trained.params, tc.encoder, tc.features, eval, config.eval);
    cell.eer = r.rates.eer;
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

std::vector<ArmSummary> summarize(const std::vector<CellResult>& cells) {
  std::vector<ArmSummary> out;
  std::map<std::pair<int, std::size_t>, std::vector<double>> groups;
  std::vector<std::pair<Arm, std::size_t>> order;
  for (const auto& c : cells) {
    auto key = std::make_pair(static_cast<int>(c.arm), c.utterances_per_speaker);
    if (!groups.count(key)) order.emplace_back(c.arm, c.utterances_per_speaker);
    auto& g = groups[key];
    if (c.ok) g.push_back(c.eer);
  }
  for (const auto& [arm, upk] : order) {
    const auto& eers = groups[{static_cast<int>(arm), upk}];
    ArmSummary s;
    s.arm = arm;
    s.utterances_per_speaker = upk;
    s.completed = eers.size();
    s.mean_eer = mean_of(eers);
    s.std_eer = sample_std(eers);
    s.single_seed = eers.size() == 1;
    out.push_back(s);
  }
  for (auto& s : out) {
    for (const auto& b : out) {
      if (b.arm == Arm::kBaseline && b.utterances_per_speaker == s.utterances_per_speaker &&
          b.completed > 0 && s.completed > 0 && b.mean_eer > 0.0) {
        s.relative_improvement = relative_improvement(b.mean_eer, s.mean_eer);
      }
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const Corpus& train_pool, const Corpus& eval,
                                const CellCallback& on_cell) {
  if (config.seeds == 0) throw ConfigError("experiment.seeds must be >= 1");
  check_disjoint_speakers(train_pool, eval);
  ExperimentReport report;
  for (std::size_t upk : config.utterances_per_speaker) {
    for (Arm arm : config.arms) {
      for (std::size_t s = 0; s < config.seeds; ++s) {
        report.cells.push_back(run_cell(config, train_pool, eval, arm, upk, s));
        if (on_cell) on_cell(report.cells.back());
      }
    }
  }
  report.summaries = summarize(report.cells);
  return report;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "arm,utterances_per_speaker,seed,eer_percent,mean_eer_percent,"
         "std_eer_percent,relative_improvement_percent\n";
  for (const auto& c : report.cells) {
    const ArmSummary* s = report.find(c.arm, c.utterances_per_speaker);
    out << to_string(c.arm) << ',' << c.utterances_per_speaker << ','
        << c.seed_index << ',' << (c.ok ? fixed(100.0 * c.eer) : "failed")
        << ',';
    if (s && s->completed > 0) {
      out << fixed(100.0 * s->mean_eer) << ',' << fixed(100.0 * s->std_eer);
    } else {
      out << "NA,NA";
    }
    out << ',';
    if (s && s->relative_improvement) {
      out << fixed(100.0 * *s->relative_improvement);
    } else {
      out << "NA";
    }
    out << '\n';
  }
}

}  // namespace cmix
