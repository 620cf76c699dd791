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

#include "cmix/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmix/errors.hpp"

namespace cmix::ops {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

[[noreturn]] void shape_error(const char* op, const Graph& g,
                              const std::string& detail) {
  throw ContractError(std::string(op) + " (next node #" +
                      std::to_string(g.size()) + "): " + detail);
}

Graph& same_graph(const char* op, Var a, Var b) {
  if (a.graph == nullptr || a.graph != b.graph) {
    throw ContractError(std::string(op) + ": operands from different graphs");
  }
  return *a.graph;
}

void require_matrix(const char* op, const Graph& g, Var x) {
  if (!x.value().is_matrix()) {
    shape_error(op, g, "expected a matrix operand, got node #" +
                           std::to_string(x.id) + " " +
                           shape_string(x.value().shape));
  }
}

void require_same_shape(const char* op, const Graph& g, Var a, Var b) {
  if (a.value().shape != b.value().shape) {
    shape_error(op, g, "shape mismatch " + shape_string(a.value().shape) +
                           " (node #" + std::to_string(a.id) + ") vs " +
                           shape_string(b.value().shape) + " (node #" +
                           std::to_string(b.id) + ")");
  }
}

void require_scalar(const char* op, const Graph& g, Var s) {
  if (!s.value().is_scalar()) {
    shape_error(op, g, "expected a scalar, got node #" + std::to_string(s.id) +
                           " " + shape_string(s.value().shape));
  }
}

template <typename F>
Var unary(const char* op, Var x, F f, std::function<double(double, double)> df) {
  Graph& g = *x.graph;
  Tensor out = x.value();
  for (double& v : out.values) v = f(v);
  return g.record(op, {x.id}, std::move(out),
                  [xid = x.id, df](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const auto& xv = gr.value(xid).values;
                    const auto& yv = gr.value(self).values;
                    for (std::size_t i = 0; i < gx.size(); ++i) {
                      gx[i] += up[i] * df(xv[i], yv[i]);
                    }
                  });
}

}  // namespace

Var add(Var a, Var b) {
  Graph& g = same_graph("add", a, b);
  require_same_shape("add", g, a, b);
  Tensor out = a.value();
  const auto& bv = b.value().values;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += bv[i];
  return g.record("add", {a.id, b.id}, std::move(out),
                  [aid = a.id, bid = b.id](Graph& gr, std::size_t self) {
                    auto up = gr.upstream(self);
                    for (std::size_t id : {aid, bid}) {
                      auto gx = gr.grad_buffer(id);
                      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += up[i];
                    }
                  });
}

Var sub(Var a, Var b) {
  Graph& g = same_graph("sub", a, b);
  require_same_shape("sub", g, a, b);
  Tensor out = a.value();
  const auto& bv = b.value().values;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= bv[i];
  return g.record("sub", {a.id, b.id}, std::move(out),
                  [aid = a.id, bid = b.id](Graph& gr, std::size_t self) {
                    auto up = gr.upstream(self);
                    auto ga = gr.grad_buffer(aid);
                    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += up[i];
                    auto gb = gr.grad_buffer(bid);
                    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= up[i];
                  });
}

Var mul(Var a, Var b) {
  Graph& g = same_graph("mul", a, b);
  require_same_shape("mul", g, a, b);
  Tensor out = a.value();
  const auto& bv = b.value().values;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= bv[i];
  return g.record("mul", {a.id, b.id}, std::move(out),
                  [aid = a.id, bid = b.id](Graph& gr, std::size_t self) {
                    auto up = gr.upstream(self);
                    const auto& av = gr.value(aid).values;
                    const auto& bv2 = gr.value(bid).values;
                    auto ga = gr.grad_buffer(aid);
                    for (std::size_t i = 0; i < ga.size(); ++i)
                      ga[i] += up[i] * bv2[i];
                    auto gb = gr.grad_buffer(bid);
                    for (std::size_t i = 0; i < gb.size(); ++i)
                      gb[i] += up[i] * av[i];
                  });
}

Var mul_const(Var x, double c) {
  return unary(
      "mul_const", x, [c](double v) { return c * v; },
      [c](double, double) { return c; });
}

Var scale(Var x, Var s) {
  Graph& g = same_graph("scale", x, s);
  require_scalar("scale", g, s);
  double sv = s.value().item();
  Tensor out = x.value();
  for (double& v : out.values) v *= sv;
  return g.record("scale", {x.id, s.id}, std::move(out),
                  [xid = x.id, sid = s.id](Graph& gr, std::size_t self) {
                    auto up = gr.upstream(self);
                    const auto& xv = gr.value(xid).values;
                    double s_val = gr.value(sid).item();
                    auto gx = gr.grad_buffer(xid);
                    for (std::size_t i = 0; i < gx.size(); ++i)
                      gx[i] += up[i] * s_val;
                    auto gs = gr.grad_buffer(sid);
                    if (!gs.empty()) {
                      double acc = 0.0;
                      for (std::size_t i = 0; i < xv.size(); ++i)
                        acc += up[i] * xv[i];
                      gs[0] += acc;
                    }
                  });
}

Var shift(Var x, Var s) {
  Graph& g = same_graph("shift", x, s);
  require_scalar("shift", g, s);
  double sv = s.value().item();
  Tensor out = x.value();
  for (double& v : out.values) v += sv;
  return g.record("shift", {x.id, s.id}, std::move(out),
                  [xid = x.id, sid = s.id](Graph& gr, std::size_t self) {
                    auto up = gr.upstream(self);
                    auto gx = gr.grad_buffer(xid);
                    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += up[i];
                    auto gs = gr.grad_buffer(sid);
                    if (!gs.empty()) {
                      double acc = 0.0;
                      for (double u : up) acc += u;
                      gs[0] += acc;
                    }
                  });
}

Var add_row_bias(Var x, Var bias) {
  Graph& g = same_graph("add_row_bias", x, bias);
  require_matrix("add_row_bias", g, x);
  const std::size_t rows = x.value().rows(), cols = x.value().cols();
  if (bias.value().size() != cols) {
    shape_error("add_row_bias", g,
                "bias " + shape_string(bias.value().shape) +
                    " does not match matrix " + shape_string(x.value().shape));
  }
  Tensor out = x.value();
  const auto& bv = bias.value().values;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out.values[r * cols + c] += bv[c];
  return g.record("add_row_bias", {x.id, bias.id}, std::move(out),
                  [xid = x.id, bid = bias.id, rows, cols](Graph& gr,
                                                          std::size_t self) {
                    auto up = gr.upstream(self);
                    auto gx = gr.grad_buffer(xid);
                    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += up[i];
                    auto gb = gr.grad_buffer(bid);
                    if (gb.empty()) return;
                    for (std::size_t r = 0; r < rows; ++r)
                      for (std::size_t c = 0; c < cols; ++c)
                        gb[c] += up[r * cols + c];
                  });
}

Var matmul(Var a, Var b) {
  Graph& g = same_graph("matmul", a, b);
  require_matrix("matmul", g, a);
  require_matrix("matmul", g, b);
  const std::size_t n = a.value().rows(), k = a.value().cols(),
                    m = b.value().cols();
  if (b.value().rows() != k) {
    shape_error("matmul", g,
                "inner dimensions differ: " + shape_string(a.value().shape) +
                    " (node #" + std::to_string(a.id) + ") x " +
                    shape_string(b.value().shape) + " (node #" +
                    std::to_string(b.id) + ")");
  }
  Tensor out = Tensor::zeros({n, m});
  MutMap(out.values.data(), n, m).noalias() =
      ConstMap(a.value().values.data(), n, k) *
      ConstMap(b.value().values.data(), k, m);
  return g.record(
      "matmul", {a.id, b.id}, std::move(out),
      [aid = a.id, bid = b.id, n, k, m](Graph& gr, std::size_t self) {
        ConstMap up(gr.upstream(self).data(), n, m);
        auto ga = gr.grad_buffer(aid);
        if (!ga.empty()) {
          MutMap(ga.data(), n, k).noalias() +=
              up * ConstMap(gr.value(bid).values.data(), k, m).transpose();
        }
        auto gb = gr.grad_buffer(bid);
        if (!gb.empty()) {
          MutMap(gb.data(), k, m).noalias() +=
              ConstMap(gr.value(aid).values.data(), n, k).transpose() * up;
        }
      });
}

Var transpose(Var x) {
  Graph& g = *x.graph;
  require_matrix("transpose", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = Tensor::zeros({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.values[j * r + i] = x.value().at(i, j);
  return g.record("transpose", {x.id}, std::move(out),
                  [xid = x.id, r, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < c; ++j)
                        gx[i * c + j] += up[j * r + i];
                  });
}

Var sum(Var x) {
  Graph& g = *x.graph;
  double acc = 0.0;
  for (double v : x.value().values) acc += v;
  return g.record("sum", {x.id}, Tensor::scalar(acc),
                  [xid = x.id](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    double u = gr.upstream(self)[0];
                    for (double& v : gx) v += u;
                  });
}

Var mean(Var x) {
  Graph& g = *x.graph;
  const double n = static_cast<double>(x.value().size());
  double acc = 0.0;
  for (double v : x.value().values) acc += v;
  return g.record("mean", {x.id}, Tensor::scalar(acc / n),
                  [xid = x.id, n](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    double u = gr.upstream(self)[0] / n;
                    for (double& v : gx) v += u;
                  });
}

Var mean_axis(Var x, int axis) {
  Graph& g = *x.graph;
  require_matrix("mean_axis", g, x);
  if (axis != 0 && axis != 1) {
    shape_error("mean_axis", g, "axis must be 0 or 1");
  }
  const std::size_t r = x.value().rows(), c = x.value().cols();
  const auto& xv = x.value().values;
  Tensor out;
  if (axis == 0) {
    out = Tensor::zeros({1, c});
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out.values[j] += xv[i * c + j];
    for (double& v : out.values) v /= static_cast<double>(r);
  } else {
    out = Tensor::zeros({r, 1});
    for (std::size_t i = 0; i < r; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < c; ++j) acc += xv[i * c + j];
      out.values[i] = acc / static_cast<double>(c);
    }
  }
  return g.record("mean_axis", {x.id}, std::move(out),
                  [xid = x.id, axis, r, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < c; ++j)
                        gx[i * c + j] +=
                            axis == 0 ? up[j] / static_cast<double>(r)
                                      : up[i] / static_cast<double>(c);
                  });
}

Var exp(Var x) {
  return unary(
      "exp", x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Var log(Var x) {
  return unary(
      "log", x, [](double v) { return std::log(v); },
      [](double xv, double) { return 1.0 / xv; });
}

Var tanh(Var x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double xv, double) { return xv > 0.0 ? 1.0 : 0.0; });
}

Var l2_norm_rows(Var x) {
  Graph& g = *x.graph;
  require_matrix("l2_norm_rows", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = Tensor::zeros({r, 1});
  for (std::size_t i = 0; i < r; ++i) {
    double acc = 0.0;
    for (double v : x.value().row(i)) acc += v * v;
    out.values[i] = std::sqrt(acc);
  }
  return g.record("l2_norm_rows", {x.id}, std::move(out),
                  [xid = x.id, r, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const auto& xv = gr.value(xid).values;
                    const auto& nv = gr.value(self).values;
                    for (std::size_t i = 0; i < r; ++i) {
                      // Subgradient 0 at the origin.
                      if (nv[i] == 0.0) continue;
                      for (std::size_t j = 0; j < c; ++j)
                        gx[i * c + j] += up[i] * xv[i * c + j] / nv[i];
                    }
                  });
}

Var cosine_similarity(Var a, Var b) {
  Graph& g = same_graph("cosine_similarity", a, b);
  require_matrix("cosine_similarity", g, a);
  require_matrix("cosine_similarity", g, b);
  const std::size_t ra = a.value().rows(), rb = b.value().rows(),
                    d = a.value().cols();
  if (b.value().cols() != d) {
    shape_error("cosine_similarity", g,
                "embedding dims differ: " + shape_string(a.value().shape) +
                    " vs " + shape_string(b.value().shape));
  }
  auto row_norms = [&](const Tensor& t, const char* side) {
    std::vector<double> n(t.rows());
    for (std::size_t i = 0; i < t.rows(); ++i) {
      double acc = 0.0;
      for (double v : t.row(i)) acc += v * v;
      n[i] = std::sqrt(acc);
      if (!(n[i] > 0.0)) {
        throw NumericError("cosine_similarity (next node #" +
                           std::to_string(g.size()) + "): zero-norm " + side +
                           " row " + std::to_string(i));
      }
    }
    return n;
  };
  std::vector<double> na = row_norms(a.value(), "left");
  std::vector<double> nb = row_norms(b.value(), "right");
  Tensor out = Tensor::zeros({ra, rb});
  MutMap(out.values.data(), ra, rb).noalias() =
      ConstMap(a.value().values.data(), ra, d) *
      ConstMap(b.value().values.data(), rb, d).transpose();
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < rb; ++j) out.values[i * rb + j] /= na[i] * nb[j];
  return g.record(
      "cosine_similarity", {a.id, b.id}, std::move(out),
      [aid = a.id, bid = b.id, ra, rb, d, na = std::move(na),
       nb = std::move(nb)](Graph& gr, std::size_t self) {
        auto up = gr.upstream(self);
        const auto& av = gr.value(aid).values;
        const auto& bv = gr.value(bid).values;
        const auto& cs = gr.value(self).values;
        // d cos / d a_i = (b_j / |b_j| - cos_ij * a_i / |a_i|) / |a_i|
        auto ga = gr.grad_buffer(aid);
        if (!ga.empty()) {
          for (std::size_t i = 0; i < ra; ++i) {
            for (std::size_t j = 0; j < rb; ++j) {
              double u = up[i * rb + j];
              if (u == 0.0) continue;
              double cij = cs[i * rb + j];
              for (std::size_t k = 0; k < d; ++k) {
                ga[i * d + k] += u *
                                 (bv[j * d + k] / nb[j] -
                                  cij * av[i * d + k] / na[i]) /
                                 na[i];
              }
            }
          }
        }
        auto gb = gr.grad_buffer(bid);
        if (!gb.empty()) {
          for (std::size_t j = 0; j < rb; ++j) {
            for (std::size_t i = 0; i < ra; ++i) {
              double u = up[i * rb + j];
              if (u == 0.0) continue;
              double cij = cs[i * rb + j];
              for (std::size_t k = 0; k < d; ++k) {
                gb[j * d + k] += u *
                                 (av[i * d + k] / na[i] -
                                  cij * bv[j * d + k] / nb[j]) /
                                 nb[j];
              }
            }
          }
        }
      });
}

Var softmax_rows(Var x) {
  Graph& g = *x.graph;
  require_matrix("softmax_rows", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = x.value();
  for (std::size_t i = 0; i < r; ++i) {
    auto row = out.row(i);
    double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : row) v /= z;
  }
  return g.record("softmax_rows", {x.id}, std::move(out),
                  [xid = x.id, r, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const auto& y = gr.value(self).values;
                    for (std::size_t i = 0; i < r; ++i) {
                      double dot = 0.0;
                      for (std::size_t j = 0; j < c; ++j)
                        dot += up[i * c + j] * y[i * c + j];
                      for (std::size_t j = 0; j < c; ++j)
                        gx[i * c + j] += y[i * c + j] * (up[i * c + j] - dot);
                    }
                  });
}

Var log_sum_exp_rows(Var x) {
  Graph& g = *x.graph;
  require_matrix("log_sum_exp_rows", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = Tensor::zeros({r, 1});
  for (std::size_t i = 0; i < r; ++i) {
    auto row = x.value().row(i);
    double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    out.values[i] = mx + std::log(z);
  }
  return g.record("log_sum_exp_rows", {x.id}, std::move(out),
                  [xid = x.id, r, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const auto& xv = gr.value(xid).values;
                    const auto& lse = gr.value(self).values;
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < c; ++j)
                        gx[i * c + j] +=
                            up[i] * std::exp(xv[i * c + j] - lse[i]);
                  });
}

Var weighted_log_sum_exp_rows(Var x, std::span<const double> weights) {
  Graph& g = *x.graph;
  require_matrix("weighted_log_sum_exp_rows", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (weights.size() != r * c) {
    shape_error("weighted_log_sum_exp_rows", g,
                "weights have " + std::to_string(weights.size()) +
                    " entries for " + shape_string(x.value().shape));
  }
  std::vector<double> w(weights.begin(), weights.end());
  Tensor out = Tensor::zeros({r, 1});
  for (std::size_t i = 0; i < r; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) {
      double wij = w[i * c + j];
      if (wij < 0.0 || !std::isfinite(wij)) {
        throw ContractError("weighted_log_sum_exp_rows: weight (" +
                            std::to_string(i) + "," + std::to_string(j) +
                            ") is negative or non-finite");
      }
      if (wij > 0.0) mx = std::max(mx, x.value().at(i, j));
    }
    if (mx == -std::numeric_limits<double>::infinity()) {
      throw ContractError("weighted_log_sum_exp_rows: row " +
                          std::to_string(i) + " has no positive weight");
    }
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      double wij = w[i * c + j];
      if (wij > 0.0) z += wij * std::exp(x.value().at(i, j) - mx);
    }
    out.values[i] = mx + std::log(z);
  }
  return g.record("weighted_log_sum_exp_rows", {x.id}, std::move(out),
                  [xid = x.id, r, c, w = std::move(w)](Graph& gr,
                                                       std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const auto& xv = gr.value(xid).values;
                    const auto& lse = gr.value(self).values;
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < c; ++j) {
                        double wij = w[i * c + j];
                        if (wij > 0.0)
                          gx[i * c + j] +=
                              up[i] * wij * std::exp(xv[i * c + j] - lse[i]);
                      }
                  });
}

Var gather_cols(Var x, std::span<const std::size_t> index) {
  Graph& g = *x.graph;
  require_matrix("gather_cols", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (index.size() != r) {
    shape_error("gather_cols", g,
                std::to_string(index.size()) + " indices for " +
                    std::to_string(r) + " rows");
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  Tensor out = Tensor::zeros({r, 1});
  for (std::size_t i = 0; i < r; ++i) {
    if (idx[i] >= c) {
      shape_error("gather_cols", g,
                  "index " + std::to_string(idx[i]) + " out of range in row " +
                      std::to_string(i));
    }
    out.values[i] = x.value().at(i, idx[i]);
  }
  return g.record("gather_cols", {x.id}, std::move(out),
                  [xid = x.id, c, idx = std::move(idx)](Graph& gr,
                                                        std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    for (std::size_t i = 0; i < idx.size(); ++i)
                      gx[i * c + idx[i]] += up[i];
                  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no operands");
  Graph& g = *parts[0].graph;
  std::size_t cols = 0, rows = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.graph != &g) throw ContractError("concat_rows: mixed graphs");
    require_matrix("concat_rows", g, p);
    if (ids.empty()) cols = p.value().cols();
    if (p.value().cols() != cols) {
      shape_error("concat_rows", g,
                  "column mismatch at node #" + std::to_string(p.id));
    }
    rows += p.value().rows();
    ids.push_back(p.id);
  }
  std::vector<double> vals;
  vals.reserve(rows * cols);
  for (const Var& p : parts)
    vals.insert(vals.end(), p.value().values.begin(), p.value().values.end());
  auto input_ids = ids;
  return g.record("concat_rows", std::move(input_ids),
                  Tensor::matrix(rows, cols, std::move(vals)),
                  [ids = std::move(ids)](Graph& gr, std::size_t self) {
                    auto up = gr.upstream(self);
                    std::size_t offset = 0;
                    for (std::size_t id : ids) {
                      auto gx = gr.grad_buffer(id);
                      std::size_t n = gr.value(id).size();
                      for (std::size_t i = 0; i < gx.size(); ++i)
                        gx[i] += up[offset + i];
                      offset += n;
                    }
                  });
}

Var slice_rows(Var x, std::size_t begin, std::size_t count) {
  Graph& g = *x.graph;
  require_matrix("slice_rows", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (count == 0 || begin + count > r) {
    shape_error("slice_rows", g,
                "rows [" + std::to_string(begin) + ", " +
                    std::to_string(begin + count) + ") out of " +
                    std::to_string(r));
  }
  auto first = x.value().values.begin() + static_cast<std::ptrdiff_t>(begin * c);
  std::vector<double> vals(first, first + static_cast<std::ptrdiff_t>(count * c));
  return g.record("slice_rows", {x.id},
                  Tensor::matrix(count, c, std::move(vals)),
                  [xid = x.id, begin, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    for (std::size_t i = 0; i < up.size(); ++i)
                      gx[begin * c + i] += up[i];
                  });
}

Var segment_mean(Var x, std::size_t block) {
  Graph& g = *x.graph;
  require_matrix("segment_mean", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (block == 0 || r % block != 0) {
    shape_error("segment_mean", g,
                std::to_string(r) + " rows do not split into blocks of " +
                    std::to_string(block));
  }
  const std::size_t s = r / block;
  Tensor out = Tensor::zeros({s, c});
  const auto& xv = x.value().values;
  for (std::size_t k = 0; k < s; ++k) {
    for (std::size_t t = 0; t < block; ++t)
      for (std::size_t j = 0; j < c; ++j)
        out.values[k * c + j] += xv[(k * block + t) * c + j];
    for (std::size_t j = 0; j < c; ++j)
      out.values[k * c + j] /= static_cast<double>(block);
  }
  return g.record("segment_mean", {x.id}, std::move(out),
                  [xid = x.id, block, s, c](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const double inv = 1.0 / static_cast<double>(block);
                    for (std::size_t k = 0; k < s; ++k)
                      for (std::size_t t = 0; t < block; ++t)
                        for (std::size_t j = 0; j < c; ++j)
                          gx[(k * block + t) * c + j] += up[k * c + j] * inv;
                  });
}

Var segment_softmax(Var x, std::size_t block) {
  Graph& g = *x.graph;
  require_matrix("segment_softmax", g, x);
  const std::size_t r = x.value().rows();
  if (x.value().cols() != 1 || block == 0 || r % block != 0) {
    shape_error("segment_softmax", g,
                "expected an Rx1 column divisible into blocks of " +
                    std::to_string(block) + ", got " +
                    shape_string(x.value().shape));
  }
  Tensor out = x.value();
  for (std::size_t k = 0; k < r / block; ++k) {
    auto first = out.values.begin() + static_cast<std::ptrdiff_t>(k * block);
    auto last = first + static_cast<std::ptrdiff_t>(block);
    double mx = *std::max_element(first, last);
    double z = 0.0;
    for (auto it = first; it != last; ++it) {
      *it = std::exp(*it - mx);
      z += *it;
    }
    for (auto it = first; it != last; ++it) *it /= z;
  }
  return g.record("segment_softmax", {x.id}, std::move(out),
                  [xid = x.id, block, r](Graph& gr, std::size_t self) {
                    auto gx = gr.grad_buffer(xid);
                    if (gx.empty()) return;
                    auto up = gr.upstream(self);
                    const auto& y = gr.value(self).values;
                    for (std::size_t k = 0; k < r / block; ++k) {
                      double dot = 0.0;
                      for (std::size_t t = 0; t < block; ++t)
                        dot += up[k * block + t] * y[k * block + t];
                      for (std::size_t t = 0; t < block; ++t)
                        gx[k * block + t] +=
                            y[k * block + t] * (up[k * block + t] - dot);
                    }
                  });
}

Var segment_weighted_sum(Var x, Var a, std::size_t block) {
  Graph& g = same_graph("segment_weighted_sum", x, a);
  require_matrix("segment_weighted_sum", g, x);
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (a.value().size() != r || block == 0 || r % block != 0) {
    shape_error("segment_weighted_sum", g,
                "weights " + shape_string(a.value().shape) + " for values " +
                    shape_string(x.value().shape) + " in blocks of " +
                    std::to_string(block));
  }
  const std::size_t s = r / block;
  Tensor out = Tensor::zeros({s, c});
  const auto& xv = x.value().values;
  const auto& av = a.value().values;
  for (std::size_t k = 0; k < s; ++k)
    for (std::size_t t = 0; t < block; ++t) {
      std::size_t row = k * block + t;
      for (std::size_t j = 0; j < c; ++j)
        out.values[k * c + j] += av[row] * xv[row * c + j];
    }
  return g.record(
      "segment_weighted_sum", {x.id, a.id}, std::move(out),
      [xid = x.id, aid = a.id, block, s, c](Graph& gr, std::size_t self) {
        auto up = gr.upstream(self);
        const auto& xv2 = gr.value(xid).values;
        const auto& av2 = gr.value(aid).values;
        auto gx = gr.grad_buffer(xid);
        auto ga = gr.grad_buffer(aid);
        for (std::size_t k = 0; k < s; ++k)
          for (std::size_t t = 0; t < block; ++t) {
            std::size_t row = k * block + t;
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              if (!gx.empty()) gx[row * c + j] += av2[row] * up[k * c + j];
              acc += xv2[row * c + j] * up[k * c + j];
            }
            if (!ga.empty()) ga[row] += acc;
          }
      });
}

}  // namespace cmix::ops
