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

#include "cmix/tensor.hpp"

#include <cmath>
#include <sstream>

#include "cmix/errors.hpp"

namespace cmix {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
  if (shape.empty()) throw ContractError("tensor: empty shape");
  for (std::size_t d : shape) {
    if (d == 0) throw ContractError("tensor: zero-sized dimension in " +
                                    shape_string(shape));
  }
  if (shape_product(shape) != values.size()) {
    throw ContractError("tensor: shape " + shape_string(shape) +
                        " does not match " + std::to_string(values.size()) +
                        " values");
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  return filled(std::move(shape), 0.0);
}

Tensor Tensor::filled(std::vector<std::size_t> shape, double value) {
  std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape.size() != 2) {
    throw ContractError("tensor: rows() on non-matrix " + shape_string(shape));
  }
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) {
    throw ContractError("tensor: cols() on non-matrix " + shape_string(shape));
  }
  return shape[1];
}

double Tensor::item() const {
  if (values.size() != 1) {
    throw ContractError("tensor: item() on " + shape_string(shape));
  }
  return values[0];
}

std::span<const double> Tensor::row(std::size_t r) const {
  std::size_t c = cols();
  return {values.data() + r * c, c};
}

std::span<double> Tensor::row(std::size_t r) {
  std::size_t c = cols();
  return {values.data() + r * c, c};
}

bool Tensor::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace cmix
