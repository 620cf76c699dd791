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

#include "cmix/adam.hpp"

#include <cmath>

#include "cmix/errors.hpp"

namespace cmix {

AdamState::AdamState(std::size_t n_params, AdamOptions opts)
    : first_moment(n_params, 0.0),
      second_moment(n_params, 0.0),
      options(opts) {}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads) {
  const AdamOptions& o = state.options;
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw ContractError("adam_step: params/grads/moments length mismatch");
  }
  if (!(o.learning_rate >= 0.0) || !(o.beta1 > 0.0 && o.beta1 < 1.0) ||
      !(o.beta2 > 0.0 && o.beta2 < 1.0) ||
      !(o.epsilon > 0.0 && o.epsilon <= 1e-3)) {
    throw ConfigError("adam_step: hyperparameters out of range");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = o.beta1 * m + (1.0 - o.beta1) * grads[i];
    v = o.beta2 * v + (1.0 - o.beta2) * grads[i] * grads[i];
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    params[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

}  // namespace cmix
