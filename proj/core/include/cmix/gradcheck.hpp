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

#ifndef CMIX_GRADCHECK_HPP_
#define CMIX_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <vector>

namespace cmix {

// Central-difference gradient estimate (f(p+h) - f(p-h)) / 2h for every
// coordinate of `params`. `params` is copied; the loss must be deterministic.
// Throws NumericError if any evaluation is non-finite.
std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& loss_fn,
    std::span<const double> params, double step);

struct GradientComparison {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  // |a - n| / max(|a|, |n|) over entries above abs_floor
  bool ok = true;
};

// Elementwise comparison: passes when |a - n| <= rel_tol * max(|a|, |n|) or
// |a - n| <= abs_floor.
GradientComparison compare_gradients(std::span<const double> analytic,
                                     std::span<const double> numeric,
                                     double rel_tol, double abs_floor);

}  // namespace cmix

#endif  // CMIX_GRADCHECK_HPP_
