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

#include "cmix/losses.hpp"

#include <cmath>
#include <numeric>

#include "cmix/errors.hpp"
#include "cmix/ops.hpp"

namespace cmix {
namespace {

void check_lambda(const char* op, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ContractError(std::string(op) + ": lambda " + std::to_string(lambda) +
                        " outside [0, 1]");
  }
}

void check_square(const char* op, Var s) {
  const Tensor& v = s.value();
  if (!v.is_matrix() || v.rows() != v.cols()) {
    throw ContractError(std::string(op) + ": similarity matrix must be square, got " +
                        shape_string(v.shape));
  }
}

void check_shuffle(const char* op, std::span<const std::size_t> shuffle,
                   std::size_t n) {
  if (shuffle.size() != n || !is_permutation(shuffle)) {
    throw ContractError(std::string(op) + ": shuffle is not a permutation of " +
                        std::to_string(n) + " speakers");
  }
}

}  // namespace

LossKind parse_loss_kind(const std::string& name) {
  if (name == "ap") return LossKind::kAngularPrototypical;
  if (name == "ce_mixup") return LossKind::kCeMixup;
  if (name == "contrastive_mixup") return LossKind::kContrastiveMixup;
  throw ConfigError("unknown loss '" + name +
                    "' (expected ap, ce_mixup or contrastive_mixup)");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kAngularPrototypical:
      return "ap";
    case LossKind::kCeMixup:
      return "ce_mixup";
    case LossKind::kContrastiveMixup:
      return "contrastive_mixup";
  }
  return "?";
}

bool is_permutation(std::span<const std::size_t> p) {
  std::vector<bool> seen(p.size(), false);
  for (std::size_t v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<std::size_t> identity_permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

Var compute_centroids(Var support, std::size_t speakers,
                      std::size_t utterances_per_speaker) {
  if (utterances_per_speaker < 2) {
    throw ContractError("compute_centroids: need M >= 2 so that M - 1 >= 1 "
                        "support utterances exist");
  }
  const Tensor& s = support.value();
  if (!s.is_matrix() || s.rows() != speakers * (utterances_per_speaker - 1)) {
    throw ContractError("compute_centroids: support " + shape_string(s.shape) +
                        " is not (N*(M-1)) x D for N=" +
                        std::to_string(speakers) +
                        ", M=" + std::to_string(utterances_per_speaker));
  }
  return ops::segment_mean(support, utterances_per_speaker - 1);
}

Var compute_similarity_matrix(Var query, Var centroids,
                              const SimilarityParams& params) {
  Var cos = ops::cosine_similarity(query, centroids);
  return ops::shift(ops::scale(cos, params.w), params.b);
}

Var ap_loss(Var similarity) {
  check_square("ap_loss", similarity);
  const std::size_t n = similarity.value().rows();
  std::vector<std::size_t> diag = identity_permutation(n);
  Var target = ops::gather_cols(similarity, diag);
  Var lse = ops::log_sum_exp_rows(similarity);
  return ops::mul_const(ops::mean(ops::sub(target, lse)), -1.0);
}

Var mixup_classification_loss(Var logits, std::span<const std::size_t> labels,
                              std::span<const std::size_t> shuffled_labels,
                              double lambda) {
  check_lambda("mixup_classification_loss", lambda);
  const Tensor& z = logits.value();
  if (!z.is_matrix() || labels.size() != z.rows() ||
      shuffled_labels.size() != z.rows()) {
    throw ContractError("mixup_classification_loss: labels do not match logits " +
                        shape_string(z.shape));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= z.cols() || shuffled_labels[i] >= z.cols()) {
      throw ContractError("mixup_classification_loss: label out of range at "
                          "sample " + std::to_string(i));
    }
  }
  Var lse = ops::log_sum_exp_rows(logits);
  auto cross_entropy = [&](std::span<const std::size_t> y) {
    return ops::mean(ops::sub(lse, ops::gather_cols(logits, y)));
  };
  return ops::add(ops::mul_const(cross_entropy(labels), lambda),
                  ops::mul_const(cross_entropy(shuffled_labels), 1.0 - lambda));
}

Var ce_mixup_loss(Var similarity, std::span<const std::size_t> shuffle,
                  double lambda) {
  check_square("ce_mixup_loss", similarity);
  check_lambda("ce_mixup_loss", lambda);
  const std::size_t n = similarity.value().rows();
  check_shuffle("ce_mixup_loss", shuffle, n);
  std::vector<std::size_t> diag = identity_permutation(n);
  Var lse = ops::log_sum_exp_rows(similarity);
  Var own = ops::sub(ops::gather_cols(similarity, diag), lse);
  Var partner = ops::sub(ops::gather_cols(similarity, shuffle), lse);
  Var mixed = ops::add(ops::mul_const(own, lambda),
                       ops::mul_const(partner, 1.0 - lambda));
  return ops::mul_const(ops::mean(mixed), -1.0);
}

LabelWeights build_label_weights(std::size_t n,
                                 std::span<const std::size_t> shuffle,
                                 double lambda) {
  check_lambda("build_label_weights", lambda);
  check_shuffle("build_label_weights", shuffle, n);
  LabelWeights w;
  w.n = n;
  w.lambda = lambda;
  w.shuffle.assign(shuffle.begin(), shuffle.end());
  w.d.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (shuffle[j] == j) {
      // Both masses land on the same column.
      w.d[j * n + j] = 1.0;
    } else {
      w.d[j * n + j] = lambda;
      w.d[j * n + shuffle[j]] = 1.0 - lambda;
    }
  }
  return w;
}

Var contrastive_mixup_loss(Var similarity, const LabelWeights& weights) {
  check_square("contrastive_mixup_loss", similarity);
  const std::size_t n = similarity.value().rows();
  if (weights.n != n || weights.d.size() != n * n) {
    throw ContractError("contrastive_mixup_loss: label weights are " +
                        std::to_string(weights.n) + "x" +
                        std::to_string(weights.n) + " for an " +
                        std::to_string(n) + "x" + std::to_string(n) +
                        " similarity matrix");
  }
  for (std::size_t j = 0; j < n; ++j) {
    double row = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      row += weights.at(j, k);
      any |= weights.at(j, k) > 0.0;
    }
    if (!any) {
      throw ContractError("contrastive_mixup_loss: label weight row " +
                          std::to_string(j) + " is all zero");
    }
    if (std::abs(row - 1.0) > 1e-12) {
      throw ContractError("contrastive_mixup_loss: label weight row " +
                          std::to_string(j) + " sums to " +
                          std::to_string(row));
    }
  }
  Var numerator = ops::weighted_log_sum_exp_rows(similarity, weights.d);
  Var denominator = ops::log_sum_exp_rows(similarity);
  return ops::mul_const(ops::mean(ops::sub(numerator, denominator)), -1.0);
}

Var batch_loss(LossKind kind, Var similarity,
               std::span<const std::size_t> shuffle, double lambda) {
  switch (kind) {
    case LossKind::kAngularPrototypical:
      return ap_loss(similarity);
    case LossKind::kCeMixup:
      return ce_mixup_loss(similarity, shuffle, lambda);
    case LossKind::kContrastiveMixup:
      return contrastive_mixup_loss(
          similarity,
          build_label_weights(similarity.value().rows(), shuffle, lambda));
  }
  throw ContractError("batch_loss: unknown loss kind");
}

}  // namespace cmix
