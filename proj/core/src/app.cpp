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

#include "cmix/app.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmix/checkpoint.hpp"
#include "cmix/errors.hpp"
#include "cmix/gradcheck.hpp"
#include "cmix/losses.hpp"
#include "cmix/ops.hpp"

namespace cmix::app {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

struct LossGradResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  bool ok = true;
};

// Analytic vs central-difference gradients of one loss w.r.t. support,
// query, w and b on random batches.
LossGradResult check_loss(LossKind kind, std::size_t batches, Rng& rng) {
  static constexpr std::size_t kSpeakers[] = {2, 3, 5};
  static constexpr std::size_t kUtterances[] = {2, 3};
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LossGradResult out;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t n = kSpeakers[b % 3], m = kUtterances[(b / 3) % 2], d = 4;
    const std::size_t n_support = n * (m - 1) * d, n_query = n * d;
    std::vector<double> flat(n_support + n_query + 2);
    for (std::size_t i = 0; i < n_support + n_query; ++i) flat[i] = normal(rng);
    flat[n_support + n_query] = 1.0 + 4.0 * unit(rng);
    flat[n_support + n_query + 1] = -1.0 + 2.0 * unit(rng);
    const double lambda = unit(rng);
    const auto shuffle = sample_shuffle(n, rng);
    auto build = [&](Graph& g, std::span<const double> p, std::vector<Var>& leaves) {
      auto take = [&](std::size_t off, std::vector<std::size_t> shape) {
        std::vector<double> v(p.begin() + static_cast<std::ptrdiff_t>(off),
                              p.begin() + static_cast<std::ptrdiff_t>(off + shape_product(shape)));
        leaves.push_back(g.leaf(Tensor(std::move(shape), std::move(v)), true));
        return leaves.back();
      };
      Var support = take(0, {n * (m - 1), d});
      Var query = take(n_support, {n, d});
      Var w = take(n_support + n_query, {1});
      Var bias = take(n_support + n_query + 1, {1});
      Var c = compute_centroids(support, n, m);
      Var s = compute_similarity_matrix(query, c, {w, bias});
      return batch_loss(kind, s, shuffle, lambda);
    };
    Graph g;
    std::vector<Var> leaves;
    Var loss = build(g, flat, leaves);
    g.backward(loss);
    std::vector<double> analytic;
    for (const Var& l : leaves) analytic.insert(analytic.end(), l.grad().begin(), l.grad().end());
    auto numeric = finite_difference_gradient(
        [&](std::span<const double> p) {
          Graph g2;
          std::vector<Var> l2;
          return build(g2, p, l2).value().item();
        },
        flat, 1e-6);
    const auto cmp = compare_gradients(analytic, numeric, 1e-4, 1e-7);
    out.max_rel_error = std::max(out.max_rel_error, cmp.max_rel_error);
    out.max_abs_error = std::max(out.max_abs_error, cmp.max_abs_error);
    out.ok = out.ok && cmp.ok;
  }
  return out;
}

}  // namespace

FeatureConfig feature_config(const Config& c) {
  FeatureConfig f;
  f.sample_rate = static_cast<int>(c.get_int("data.sample_rate"));
  f.mel_filters = c.get_size("data.mel_filters");
  return f;
}

EncoderConfig encoder_config(const Config& c) {
  EncoderConfig e;
  e.input_dim = c.get_size("data.mel_filters");
  e.hidden_dims = c.get_size_list("model.hidden_dims");
  e.embedding_dim = c.get_size("model.embedding_dim");
  e.pooling = parse_pooling(c.get("model.pooling"));
  e.activation = parse_activation(c.get("model.activation"));
  e.validate();
  return e;
}

MixupConfig mixup_config(const Config& c) {
  MixupConfig m;
  m.enabled = c.get_bool("mixup.enabled");
  m.alpha = c.get_double("mixup.alpha");
  m.level = parse_mix_level(c.get("mixup.level"));
  m.rng_seed = 0;
  if (!(m.alpha > 0.0)) throw ConfigError("mixup.alpha must be positive");
  return m;
}

AugmentConfig augment_config(const Config& c) {
  AugmentConfig a;
  a.enabled = c.get_bool("aug.enabled");
  a.snr_min_db = c.get_double("aug.snr_min_db");
  a.snr_max_db = c.get_double("aug.snr_max_db");
  a.reverb_taps = c.get_size("aug.reverb_taps");
  if (a.snr_min_db > a.snr_max_db) {
    throw ConfigError("aug.snr_min_db exceeds aug.snr_max_db");
  }
  return a;
}

TrainConfig train_config(const Config& c) {
  TrainConfig t;
  t.epochs = c.get_size("train.epochs");
  t.batches_per_epoch = c.get_size("train.batches_per_epoch");
  t.speakers_per_batch = c.get_size("train.n");
  t.utterances_per_speaker = c.get_size("train.m");
  t.segment_seconds = c.get_double("data.segment_seconds");
  t.learning_rate = c.get_double("train.lr");
  t.lr_decay = c.get_double("train.lr_decay");
  t.lr_decay_epochs = c.get_size("train.lr_decay_epochs");
  t.loss = parse_loss_kind(c.get("train.loss"));
  t.mixup = mixup_config(c);
  t.augment = augment_config(c);
  t.features = feature_config(c);
  t.encoder = encoder_config(c);
  t.seed = c.get_u64("seed");
  t.validate();
  return t;
}

EvalConfig eval_config(const Config& c) {
  EvalConfig e;
  e.crop_seconds = c.get_double("eval.crop_seconds");
  e.n_crops = c.get_size("eval.crops");
  e.n_target = c.get_size("eval.n_target");
  e.n_nontarget = c.get_size("eval.n_nontarget");
  e.seed = c.get_u64("seed");
  if (e.n_crops == 0 || !(e.crop_seconds > 0.0)) {
    throw ConfigError("eval.crops and eval.crop_seconds must be positive");
  }
  return e;
}

SyntheticCorpusConfig train_corpus_config(const Config& c) {
  SyntheticCorpusConfig s;
  s.n_speakers = c.get_size("data.n_speakers");
  s.utterances_per_speaker = c.get_size("data.utterances_per_speaker");
  s.utterance_seconds = c.get_double("data.utterance_seconds");
  s.sample_rate = static_cast<int>(c.get_int("data.sample_rate"));
  s.difficulty = c.get_double("data.difficulty");
  s.segment_seconds = c.get_double("data.segment_seconds");
  s.speaker_prefix = "spk";
  s.split = Split::kTrain;
  return s;
}

SyntheticCorpusConfig eval_corpus_config(const Config& c) {
  SyntheticCorpusConfig s = train_corpus_config(c);
  s.n_speakers = c.get_size("data.eval_speakers");
  s.utterances_per_speaker = c.get_size("data.eval_utterances_per_speaker");
  s.utterance_seconds = c.get_double("data.eval_utterance_seconds");
  s.speaker_prefix = "evl";
  s.split = Split::kEval;
  return s;
}

ExperimentConfig experiment_config(const Config& c) {
  ExperimentConfig e;
  e.arms.clear();
  for (const auto& a : c.get_list("experiment.arms")) e.arms.push_back(parse_arm(a));
  if (e.arms.empty()) throw ConfigError("experiment.arms is empty");
  e.utterances_per_speaker = c.get_size_list("experiment.utterances");
  if (e.utterances_per_speaker.empty()) {
    throw ConfigError("experiment.utterances is empty");
  }
  e.seeds = c.get_size("experiment.seeds");
  e.base_seed = c.get_u64("seed");
  e.train = train_config(c);
  e.eval = eval_config(c);
  for (const auto& item : c.get_list("experiment.alphas")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("experiment.alphas entries must be utterances:alpha");
    }
    Config probe;
    probe.set("train.n", item.substr(0, colon));
    probe.set("mixup.alpha", item.substr(colon + 1));
    e.alpha_by_utterances[probe.get_size("train.n")] = probe.get_double("mixup.alpha");
  }
  return e;
}

Corpora load_corpora(const Config& c, std::ostream& log) {
  Corpora out;
  const int rate = static_cast<int>(c.get_int("data.sample_rate"));
  const std::uint64_t seed = c.get_u64("seed");
  if (!c.get("data.manifest").empty()) {
    out.train = load_manifest(c.get("data.manifest"), Split::kTrain);
  } else {
    Rng rng(derive_seed(seed, {10}));
    out.train = generate_synthetic_corpus(train_corpus_config(c), rng);
  }
  if (!c.get("data.eval_manifest").empty()) {
    out.eval = load_manifest(c.get("data.eval_manifest"), Split::kEval);
  } else {
    Rng rng(derive_seed(seed, {11}));
    out.eval = generate_synthetic_corpus(eval_corpus_config(c), rng);
  }
  check_disjoint_speakers(out.train, out.eval);
  const auto summary = validate_corpus(out.train, c.get_size("train.m"), rate);
  for (const auto& w : summary.warnings) log << "warning: " << w << '\n';
  for (const auto& u : out.train.utterances) {
    if (u.sample_rate != rate) {
      throw ConfigError("utterance " + u.id + " sample rate differs from "
                        "data.sample_rate (resampling is not supported)");
    }
  }
  for (const auto& u : out.eval.utterances) {
    if (u.sample_rate != rate) {
      throw ConfigError("eval utterance " + u.id + " sample rate differs from "
                        "data.sample_rate");
    }
  }
  return out;
}

int generate_data(const Config& c, const std::filesystem::path& out_dir,
                  std::ostream& log) {
  const std::uint64_t seed = c.get_u64("seed");
  Rng train_rng(derive_seed(seed, {10}));
  Rng eval_rng(derive_seed(seed, {11}));
  const Corpus train = generate_synthetic_corpus(train_corpus_config(c), train_rng);
  const Corpus eval = generate_synthetic_corpus(eval_corpus_config(c), eval_rng);
  write_corpus(train, out_dir / "train", "manifest.tsv");
  write_corpus(eval, out_dir / "eval", "manifest.tsv");
  log << "wrote " << train.utterances.size() << " train and "
      << eval.utterances.size() << " eval utterances under " << out_dir.string()
      << '\n';
  return kExitOk;
}

int train(const Config& c, const std::filesystem::path& out, std::ostream& log) {
  const TrainConfig tc = train_config(c);
  const Corpora data = load_corpora(c, log);
  const TrainResult r = cmix::train(data.train, tc);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_checkpoint(out, c.to_text(), r.params);
  auto trace = open_out(out.string() + ".trace.csv");
  trace << "epoch,learning_rate,mean_loss\n";
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
    trace << e << ',' << fmt("%.9g", r.epoch_lr[e]) << ','
          << fmt("%.17g", r.epoch_loss[e]) << '\n';
    log << "epoch " << e << " loss " << fmt("%.6f", r.epoch_loss[e]) << '\n';
  }
  log << "checkpoint written to " << out.string() << '\n';
  return kExitOk;
}

int evaluate(const Config& c, const std::filesystem::path& checkpoint,
             const std::filesystem::path& out, std::ostream& log) {
  const Checkpoint ckpt = read_checkpoint(checkpoint);
  Config model_cfg = Config::from_text(ckpt.config_text);
  const EncoderConfig enc = encoder_config(model_cfg);
  Rng unused(0);
  EncoderParams params = init_params(enc, unused);
  params.assign(ckpt.values);
  const Corpora data = load_corpora(c, log);
  const EvaluationResult r = cmix::evaluate(params, enc, feature_config(model_cfg),
                                            data.eval, eval_config(c));
  auto csv = open_out(out);
  csv << "enroll,test,is_target,score\n";
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    csv << data.eval.utterances[r.trials[i].enroll].id << ','
        << data.eval.utterances[r.trials[i].test].id << ','
        << (r.trials[i].is_target ? 1 : 0) << ','
        << fmt("%.17g", r.scores.scores[i]) << '\n';
  }
  log << "EER " << fmt("%.4f", 100.0 * r.rates.eer) << " % at threshold "
      << fmt("%.6f", r.rates.threshold) << '\n';
  return kExitOk;
}

int experiment(const Config& c, const std::filesystem::path& out,
               std::ostream& log) {
  const ExperimentConfig ec = experiment_config(c);
  const Corpora data = load_corpora(c, log);
  const ExperimentReport report =
      run_experiment(ec, data.train, data.eval, [&](const CellResult& cell) {
        log << to_string(cell.arm) << " upk=" << cell.utterances_per_speaker
            << " seed=" << cell.seed_index << ": "
            << (cell.ok ? fmt("EER %.3f %%", 100.0 * cell.eer)
                        : "failed (" + cell.error + ")")
            << '\n';
      });
  auto csv = open_out(out);
  write_report_csv(report, csv);
  for (const auto& s : report.summaries) {
    log << to_string(s.arm) << " upk=" << s.utterances_per_speaker << " EER "
        << fmt("%.3f", 100.0 * s.mean_eer) << " +- "
        << fmt("%.3f", 100.0 * s.std_eer);
    if (s.relative_improvement) {
      log << " rel " << fmt("%+.2f %%", 100.0 * *s.relative_improvement);
    }
    if (s.single_seed) log << " (single seed: std reported as 0)";
    log << '\n';
  }
  return kExitOk;
}

int grad_check(const Config& c, const std::filesystem::path& out,
               std::ostream& log) {
  Rng rng(derive_seed(c.get_u64("seed"), {12}));
  bool ok = true;
  std::ostringstream csv;
  csv << "loss,batches,max_abs_error,max_rel_error,ok\n";
  for (LossKind k : {LossKind::kAngularPrototypical, LossKind::kCeMixup,
                     LossKind::kContrastiveMixup}) {
    const LossGradResult r = check_loss(k, 20, rng);
    ok = ok && r.ok;
    csv << to_string(k) << ",20," << fmt("%.3e", r.max_abs_error) << ','
        << fmt("%.3e", r.max_rel_error) << ','
        << (r.ok ? "pass" : "FAIL") << '\n';
    log << to_string(k) << ": max abs error " << fmt("%.3e", r.max_abs_error)
        << ", max relative error " << fmt("%.3e", r.max_rel_error)
        << (r.ok ? " (pass)" : " (FAIL)") << '\n';
  }
  if (!out.empty()) open_out(out) << csv.str();
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace cmix::app
