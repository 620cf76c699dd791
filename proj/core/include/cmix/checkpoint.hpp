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

#ifndef CMIX_CHECKPOINT_HPP_
#define CMIX_CHECKPOINT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "cmix/encoder.hpp"

namespace cmix {

// Binary layout:
//   "PMX1"
//   u64 little-endian byte length, then the config as UTF-8 text
//   every parameter as a little-endian IEEE-754 double, declaration order
struct Checkpoint {
  std::string config_text;
  std::vector<double> values;
};

std::string encode_checkpoint(const std::string& config_text,
                              const EncoderParams& params);
Checkpoint decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::filesystem::path& path,
                      const std::string& config_text,
                      const EncoderParams& params);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace cmix

#endif  // CMIX_CHECKPOINT_HPP_
