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

#include "cmix/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmix/errors.hpp"

namespace cmix {

std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& loss_fn,
    std::span<const double> params, double step) {
  if (!(step > 0.0)) throw ContractError("finite difference step must be > 0");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + step;
    const double fp = loss_fn(p);
    p[i] = orig - step;
    const double fm = loss_fn(p);
    p[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("finite difference: non-finite loss at coordinate " +
                         std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

GradientComparison compare_gradients(std::span<const double> analytic,
                                     std::span<const double> numeric,
                                     double rel_tol, double abs_floor) {
  if (analytic.size() != numeric.size()) {
    throw ContractError("compare_gradients: length mismatch");
  }
  GradientComparison out;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    const double err = std::abs(a - n);
    const double mag = std::max(std::abs(a), std::abs(n));
    out.max_abs_error = std::max(out.max_abs_error, err);
    // Entries inside the absolute floor are treated as agreeing.
    if (err <= abs_floor) continue;
    out.max_rel_error = std::max(out.max_rel_error, err / mag);
    if (err > rel_tol * mag) out.ok = false;
  }
  return out;
}

}  // namespace cmix
