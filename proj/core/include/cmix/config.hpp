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

#ifndef CMIX_CONFIG_HPP_
#define CMIX_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cmix {

// Flat "key = value" configuration. Every key has a built-in default;
// unknown keys are rejected so typos fail loudly. '#' starts a comment.
class Config {
 public:
  // All known keys with their defaults.
  Config();

  static Config from_text(const std::string& text);
  static Config from_file(const std::filesystem::path& path);

  void merge_text(const std::string& text);
  void set(const std::string& key, const std::string& value);
  // "key=value".
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::size_t> get_size_list(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  // Canonical text: one "key = value" line per key in key order.
  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cmix

#endif  // CMIX_CONFIG_HPP_
