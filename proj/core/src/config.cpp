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

#include "cmix/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmix/errors.hpp"

namespace cmix {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"seed", "1"},
      {"data.sample_rate", "16000"},
      {"data.segment_seconds", "2"},
      {"data.mel_filters", "40"},
      {"data.n_speakers", "40"},
      {"data.utterances_per_speaker", "10"},
      {"data.utterance_seconds", "4"},
      {"data.difficulty", "0.5"},
      {"data.eval_speakers", "20"},
      {"data.eval_utterances_per_speaker", "6"},
      {"data.eval_utterance_seconds", "6"},
      {"data.manifest", ""},
      {"data.eval_manifest", ""},
      {"mixup.enabled", "false"},
      {"mixup.alpha", "0.4"},
      {"mixup.level", "waveform"},
      {"aug.enabled", "false"},
      {"aug.snr_min_db", "5"},
      {"aug.snr_max_db", "20"},
      {"aug.reverb_taps", "32"},
      {"train.epochs", "30"},
      {"train.batches_per_epoch", "50"},
      {"train.n", "8"},
      {"train.m", "2"},
      {"train.lr", "0.001"},
      {"train.lr_decay", "0.95"},
      {"train.lr_decay_epochs", "10"},
      {"train.loss", "ap"},
      {"model.hidden_dims", "64,64"},
      {"model.embedding_dim", "32"},
      {"model.pooling", "sap"},
      {"model.activation", "relu"},
      {"eval.crops", "10"},
      {"eval.crop_seconds", "4"},
      {"eval.n_target", "500"},
      {"eval.n_nontarget", "500"},
      {"experiment.arms", "baseline,mixup,aug,mixup_aug"},
      {"experiment.utterances", "2,3,5,10"},
      {"experiment.seeds", "3"},
      {"experiment.alphas", ""},
  };
  return d;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config key " + key + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

Config::Config() : values_(defaults()) {}

Config Config::from_text(const std::string& text) {
  Config c;
  c.merge_text(text);
  return c;
}

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void Config::merge_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config: expected 'key = value'", line_no);
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  return parse_number<double>(key, v);
}

std::int64_t Config::get_int(const std::string& key) const {
  return parse_number<std::int64_t>(key, get(key));
}

std::size_t Config::get_size(const std::string& key) const {
  const std::int64_t v = get_int(key);
  if (v < 0) throw ConfigError("config key " + key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, get(key));
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key " + key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> Config::get_size_list(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const std::string& item : get_list(key)) {
    out.push_back(parse_number<std::size_t>(key, item));
  }
  return out;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace cmix
