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

#include "cmix/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cmix/errors.hpp"

namespace cmix {
namespace {

constexpr char kMagic[4] = {'P', 'M', 'X', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i]))
         << (8 * i);
  }
  return v;
}

}  // namespace

std::string encode_checkpoint(const std::string& config_text,
                              const EncoderParams& params) {
  std::string out(kMagic, 4);
  put_u64(out, config_text.size());
  out += config_text;
  for (double v : params.flatten()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("checkpoint: missing PMX1 header");
  }
  const std::uint64_t text_len = get_u64(bytes, 4);
  if (text_len > bytes.size() - 12) {
    throw FormatError("checkpoint: config length exceeds file size");
  }
  Checkpoint c;
  c.config_text = bytes.substr(12, text_len);
  const std::size_t body = 12 + text_len;
  if ((bytes.size() - body) % 8 != 0) {
    throw FormatError("checkpoint: parameter block is not a whole number of "
                      "doubles");
  }
  for (std::size_t pos = body; pos < bytes.size(); pos += 8) {
    c.values.push_back(std::bit_cast<double>(get_u64(bytes, pos)));
  }
  return c;
}

void write_checkpoint(const std::filesystem::path& path,
                      const std::string& config_text,
                      const EncoderParams& params) {
  const std::string bytes = encode_checkpoint(config_text, params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace cmix
