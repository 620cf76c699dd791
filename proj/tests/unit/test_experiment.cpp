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
#include <sstream>

#include "cmix/errors.hpp"
#include "cmix/experiment.hpp"
#include "doctest.h"

TEST_CASE("relative improvement is (baseline - arm) / baseline") {
  CHECK(100.0 * cmix::relative_improvement(14.80, 12.38) == doctest::Approx(16.35135).epsilon(1e-6));
  CHECK(100.0 * cmix::relative_improvement(2.21, 2.11) == doctest::Approx(4.52489).epsilon(1e-6));
  CHECK(cmix::relative_improvement(2.0, 3.0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(cmix::relative_improvement(0.0, 1.0), cmix::NumericError);
}

TEST_CASE("sample statistics use the Bessel correction") {
  const std::vector<double> xs = {2.0, 4.0, 9.0};
  CHECK(cmix::mean_of(xs) == 5.0);
  CHECK(cmix::sample_std(xs) == doctest::Approx(std::sqrt(13.0)));
  const std::vector<double> one = {3.0};
  CHECK(cmix::sample_std(one) == 0.0);
}

TEST_CASE("arms map to loss, mixup and augmentation switches") {
  const cmix::TrainConfig base;
  const auto b = cmix::configure_arm(base, cmix::Arm::kBaseline);
  CHECK(b.loss == cmix::LossKind::kAngularPrototypical);
  CHECK_FALSE(b.mixup.enabled);
  CHECK_FALSE(b.augment.enabled);
  const auto m = cmix::configure_arm(base, cmix::Arm::kMixup);
  CHECK(m.loss == cmix::LossKind::kContrastiveMixup);
  CHECK(m.mixup.enabled);
  CHECK_FALSE(m.augment.enabled);
  const auto a = cmix::configure_arm(base, cmix::Arm::kAug);
  CHECK(a.loss == cmix::LossKind::kAngularPrototypical);
  CHECK(a.augment.enabled);
  const auto ma = cmix::configure_arm(base, cmix::Arm::kMixupAug);
  CHECK(ma.mixup.enabled);
  CHECK(ma.augment.enabled);
  for (auto arm : {cmix::Arm::kBaseline, cmix::Arm::kMixup, cmix::Arm::kAug, cmix::Arm::kMixupAug})
    CHECK(cmix::parse_arm(cmix::to_string(arm)) == arm);
  CHECK_THROWS_AS(cmix::parse_arm("specaugment"), cmix::ConfigError);
}

TEST_CASE("cell seeds depend on sweep point and seed index only") {
  CHECK(cmix::cell_seed(1, 2, 0) == cmix::cell_seed(1, 2, 0));
  CHECK(cmix::cell_seed(1, 2, 0) != cmix::cell_seed(1, 2, 1));
  CHECK(cmix::cell_seed(1, 2, 0) != cmix::cell_seed(1, 5, 0));
}

TEST_CASE("summaries average completed cells and flag single seeds") {
  using cmix::Arm;
  std::vector<cmix::CellResult> cells = {
      {Arm::kBaseline, 2, 0, true, 0.20, ""}, {Arm::kBaseline, 2, 1, true, 0.10, ""},
      {Arm::kMixup, 2, 0, true, 0.12, ""},    {Arm::kMixup, 2, 1, false, 0.0, "boom"},
      {Arm::kAug, 5, 0, true, 0.3, ""}};
  const auto s = cmix::summarize(cells);
  REQUIRE(s.size() == 3);
  CHECK(s[0].mean_eer == doctest::Approx(0.15));
  CHECK(s[0].std_eer == doctest::Approx(std::sqrt(0.005)));
  CHECK(s[0].relative_improvement.has_value());
  CHECK(*s[0].relative_improvement == 0.0);
  CHECK(s[1].completed == 1);
  CHECK(s[1].single_seed);
  CHECK(s[1].std_eer == 0.0);
  CHECK(*s[1].relative_improvement == doctest::Approx(0.2));
  // No baseline at 5 utterances: no relative improvement.
  CHECK_FALSE(s[2].relative_improvement.has_value());
}

TEST_CASE("report CSV has one row per cell with group statistics") {
  using cmix::Arm;
  cmix::ExperimentReport r;
  r.cells = {{Arm::kBaseline, 2, 0, true, 0.148, ""},
             {Arm::kMixup, 2, 0, true, 0.1238, ""},
             {Arm::kMixup, 2, 1, false, 0.0, "diverged"}};
  r.summaries = cmix::summarize(r.cells);
  std::ostringstream out;
  cmix::write_report_csv(r, out);
  const std::string expected =
      "arm,utterances_per_speaker,seed,eer_percent,mean_eer_percent,std_eer_percent,"
      "relative_improvement_percent\n"
      "baseline,2,0,14.8000,14.8000,0.0000,0.0000\n"
      "mixup,2,0,12.3800,12.3800,0.0000,16.3514\n"
      "mixup,2,1,failed,12.3800,0.0000,16.3514\n";
  CHECK(out.str() == expected);
}

TEST_CASE("a failing cell is recorded and the rest proceed") {
  cmix::SyntheticCorpusConfig sc;
  sc.n_speakers = 3;
  sc.utterances_per_speaker = 3;
  sc.utterance_seconds = 1.0;
  sc.segment_seconds = 0.5;
  cmix::Rng rng(1);
  const cmix::Corpus pool = cmix::generate_synthetic_corpus(sc, rng);
  sc.speaker_prefix = "evl";
  sc.split = cmix::Split::kEval;
  const cmix::Corpus eval = cmix::generate_synthetic_corpus(sc, rng);
  cmix::ExperimentConfig ec;
  ec.arms = {cmix::Arm::kBaseline};
  ec.utterances_per_speaker = {2, 4};  // 4 exceeds the pool: every speaker dropped
  ec.seeds = 1;
  ec.train.epochs = 1;
  ec.train.batches_per_epoch = 2;
  ec.train.speakers_per_batch = 2;
  ec.train.segment_seconds = 0.25;
  ec.train.encoder.hidden_dims = {8};
  ec.train.encoder.embedding_dim = 4;
  ec.eval.crop_seconds = 0.5;
  ec.eval.n_crops = 2;
  ec.eval.n_target = 3;
  ec.eval.n_nontarget = 3;
  const auto report = cmix::run_experiment(ec, pool, eval);
  REQUIRE(report.cells.size() == 2);
  CHECK(report.cells[0].ok);
  CHECK_FALSE(report.cells[1].ok);
  CHECK_FALSE(report.cells[1].error.empty());
  // Rerunning one cell reproduces its EER exactly.
  const auto again = cmix::run_cell(ec, pool, eval, cmix::Arm::kBaseline, 2, 0);
  CHECK(again.eer == report.cells[0].eer);
  ec.seeds = 0;
  CHECK_THROWS_AS(cmix::run_experiment(ec, pool, eval), cmix::ConfigError);
}
