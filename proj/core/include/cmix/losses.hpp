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

#ifndef CMIX_LOSSES_HPP_
#define CMIX_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmix/graph.hpp"

namespace cmix {

// Initial scale and bias of the similarity matrix, and the lower clamp on the
// scale applied after every optimizer step.
inline constexpr double kInitialSimilarityScale = 10.0;
inline constexpr double kInitialSimilarityBias = -5.0;
inline constexpr double kMinSimilarityScale = 1e-6;

// Trainable affine map applied to cosine similarities: w * cos + b.
struct SimilarityParams {
  Var w;  // scalar
  Var b;  // scalar
};

// Per-batch embeddings: N speakers, M utterances each. Support rows are
// speaker-major ((N * (M - 1)) x D); the query is the M-th utterance (N x D).
struct BatchEmbeddings {
  Var support;
  Var query;
  std::size_t speakers = 0;
  std::size_t utterances_per_speaker = 0;
};

// Virtual labels for a mixed batch: row j carries lambda on its own speaker
// and 1 - lambda on the speaker it was mixed with.
struct LabelWeights {
  std::size_t n = 0;
  std::vector<double> d;  // n x n, row-major
  double lambda = 1.0;
  std::vector<std::size_t> shuffle;

  double at(std::size_t j, std::size_t k) const { return d[j * n + k]; }
};

enum class LossKind { kAngularPrototypical, kCeMixup, kContrastiveMixup };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);

bool is_permutation(std::span<const std::size_t> p);
std::vector<std::size_t> identity_permutation(std::size_t n);

// Mean of the M - 1 support embeddings of each speaker (N x D).
Var compute_centroids(Var support, std::size_t speakers,
                      std::size_t utterances_per_speaker);

// S[j][k] = w * cos(query_j, centroid_k) + b.
Var compute_similarity_matrix(Var query, Var centroids,
                              const SimilarityParams& params);

// -(1/N) sum_j log softmax(S_j)[j].
Var ap_loss(Var similarity);

// lambda * CE(logits, labels) + (1 - lambda) * CE(logits, shuffled_labels),
// each CE averaged over the batch. Closed-set reference.
Var mixup_classification_loss(Var logits, std::span<const std::size_t> labels,
                              std::span<const std::size_t> shuffled_labels,
                              double lambda);

// Interpolates the AP cross-entropy at the true column and at the column of
// the mixing partner.
Var ce_mixup_loss(Var similarity, std::span<const std::size_t> shuffle,
                  double lambda);

LabelWeights build_label_weights(std::size_t n,
                                 std::span<const std::size_t> shuffle,
                                 double lambda);

// -(1/N) sum_j log( sum_k d_jk e^{S_jk} / sum_k e^{S_jk} ).
Var contrastive_mixup_loss(Var similarity, const LabelWeights& weights);

// Dispatches on `kind`. For kAngularPrototypical the shuffle and lambda are
// ignored.
Var batch_loss(LossKind kind, Var similarity,
               std::span<const std::size_t> shuffle, double lambda);

}  // namespace cmix

#endif  // CMIX_LOSSES_HPP_
