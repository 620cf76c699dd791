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

#ifndef CMIX_OPS_HPP_
#define CMIX_OPS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "cmix/graph.hpp"

// Differentiable operations over Graph nodes. Matrix ops expect rank-2
// operands; shape violations throw ContractError naming the op and node.
namespace cmix::ops {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var mul_const(Var x, double c);
Var scale(Var x, Var s);   // s scalar; s * x
Var shift(Var x, Var s);   // s scalar; x + s
Var add_row_bias(Var x, Var bias);  // bias has cols(x) elements

Var matmul(Var a, Var b);
Var transpose(Var x);

Var sum(Var x);
Var mean(Var x);
Var mean_axis(Var x, int axis);  // 0: over rows -> 1xC, 1: over cols -> Rx1

Var exp(Var x);
Var log(Var x);
Var tanh(Var x);
Var relu(Var x);

// Row-wise Euclidean norm, R x D -> R x 1.
Var l2_norm_rows(Var x);
// cos(a_i, b_j) for A: R x D and B: C x D, giving R x C. Zero-norm rows are
// a NumericError naming the row.
Var cosine_similarity(Var a, Var b);

Var softmax_rows(Var x);
// log sum_k exp(x_rk), max-shifted. R x C -> R x 1.
Var log_sum_exp_rows(Var x);
// log sum_k w_rk exp(x_rk) with constant non-negative weights; each row needs
// at least one positive weight. R x C -> R x 1.
Var weighted_log_sum_exp_rows(Var x, std::span<const double> weights);

// out_r = x[r][index[r]], R x C -> R x 1.
Var gather_cols(Var x, std::span<const std::size_t> index);

Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var x, std::size_t begin, std::size_t count);

// Consecutive blocks of `block` rows reduced to one row each.
Var segment_mean(Var x, std::size_t block);
// Softmax of an R x 1 column within consecutive blocks.
Var segment_softmax(Var x, std::size_t block);
// out_s = sum_{t in block s} a_t * x_t for a: R x 1, x: R x C.
Var segment_weighted_sum(Var x, Var a, std::size_t block);

}  // namespace cmix::ops

#endif  // CMIX_OPS_HPP_
