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

// Command-line front end: cmix <subcommand> [--config F] [--seed S]
// [--out P] [--set key=value ...]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmix/app.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags, const std::string& out_default) {
  flags.out = out_default;
  cmd->add_option("--config", flags.config_path, "key=value config file");
  cmd->add_option("--seed", flags.seed, "base RNG seed");
  cmd->add_option("--out", flags.out, "output path")->capture_default_str();
  cmd->add_option("--set", flags.overrides, "override a config key (key=value)")
      ->allow_extra_args(false);
}

cmix::Config build_config(const CommonFlags& flags) {
  cmix::Config c = flags.config_path.empty()
                       ? cmix::Config()
                       : cmix::Config::from_file(flags.config_path);
  for (const auto& o : flags.overrides) c.apply_override(o);
  if (flags.seed) c.set("seed", std::to_string(*flags.seed));
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"contrastive mixup speaker embedding toolkit"};
  cli.require_subcommand(1);

  CommonFlags gen, trn, evl, exp, grd;
  std::string checkpoint;
  auto* gen_cmd = cli.add_subcommand("generate-data", "write the synthetic corpus as WAV + manifest");
  add_common(gen_cmd, gen, "data");
  auto* trn_cmd = cli.add_subcommand("train", "train an encoder and write a checkpoint");
  add_common(trn_cmd, trn, "model.pmx");
  auto* evl_cmd = cli.add_subcommand("evaluate", "score the eval trial list with a checkpoint");
  add_common(evl_cmd, evl, "scores.csv");
  evl_cmd->add_option("--checkpoint", checkpoint, "checkpoint from `train`")->required();
  auto* exp_cmd = cli.add_subcommand("experiment", "run the arm x sweep x seed grid");
  add_common(exp_cmd, exp, "report.csv");
  auto* grd_cmd = cli.add_subcommand("grad-check", "finite-difference check of the losses");
  add_common(grd_cmd, grd, "");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : cmix::app::kExitConfig;
  }

  namespace app = cmix::app;
  return app::guarded(std::cerr, [&]() -> int {
    if (*gen_cmd) return app::generate_data(build_config(gen), gen.out, std::cerr);
    if (*trn_cmd) return app::train(build_config(trn), trn.out, std::cerr);
    if (*evl_cmd) {
      return app::evaluate(build_config(evl), checkpoint, evl.out, std::cerr);
    }
    if (*exp_cmd) return app::experiment(build_config(exp), exp.out, std::cerr);
    return app::grad_check(build_config(grd), grd.out, std::cerr);
  });
}
