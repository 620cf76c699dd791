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

#ifndef CMIX_ADAM_HPP_
#define CMIX_ADAM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cmix {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment estimates for a flat parameter vector.
struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
  AdamOptions options;

  AdamState() = default;
  AdamState(std::size_t n_params, AdamOptions opts);
};

// One bias-corrected Adam update in place. Throws ContractError on length
// mismatch and ConfigError on out-of-range hyperparameters.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads);

}  // namespace cmix

#endif  // CMIX_ADAM_HPP_
