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

#ifndef CMIX_RANDOM_HPP_
#define CMIX_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cmix {

// All stochastic code takes an explicit engine; nothing reads global state.
using Rng = std::mt19937_64;

// Mixes a base seed with integer tags into an independent stream seed
// (splitmix64 finalizer per tag).
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags);

}  // namespace cmix

#endif  // CMIX_RANDOM_HPP_
