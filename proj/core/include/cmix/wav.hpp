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

#ifndef CMIX_WAV_HPP_
#define CMIX_WAV_HPP_

#include <filesystem>
#include <span>
#include <vector>

namespace cmix {

struct WavData {
  int sample_rate = 0;
  std::vector<double> samples;  // in [-1, 1)
};

// Reads a RIFF WAV holding mono 16-bit PCM. PCM value v maps to v / 32768.
// Throws FormatError for any other encoding or a truncated file.
WavData read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM; samples are scaled by 32768, rounded and clipped.
void write_wav(const std::filesystem::path& path,
               std::span<const double> samples, int sample_rate);

}  // namespace cmix

#endif  // CMIX_WAV_HPP_
