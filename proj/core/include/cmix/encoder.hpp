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

#ifndef CMIX_ENCODER_HPP_
#define CMIX_ENCODER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmix/graph.hpp"
#include "cmix/losses.hpp"
#include "cmix/random.hpp"
#include "cmix/tensor.hpp"

namespace cmix {

enum class Activation { kRelu, kTanh };
enum class Pooling { kMean, kSap };

Activation parse_activation(const std::string& name);
Pooling parse_pooling(const std::string& name);
std::string to_string(Activation a);
std::string to_string(Pooling p);

// Frame-level MLP, temporal pooling, linear projection to the embedding.
struct EncoderConfig {
  std::size_t input_dim = 40;
  std::vector<std::size_t> hidden_dims = {64, 64};
  std::size_t embedding_dim = 32;
  Activation activation = Activation::kRelu;
  Pooling pooling = Pooling::kSap;

  void validate() const;
  std::size_t pooled_dim() const { return hidden_dims.back(); }
};

// Tensors in declaration order: per hidden layer (weight, bias), attention
// projection, attention bias, attention context, output weight, output
// bias, similarity scale w, similarity bias b.
struct EncoderParams {
  std::vector<Tensor> layer_weights;
  std::vector<Tensor> layer_biases;
  Tensor attention_weight;   // H x H
  Tensor attention_bias;     // 1 x H
  Tensor attention_context;  // H x 1
  Tensor output_weight;      // H x D
  Tensor output_bias;        // 1 x D
  Tensor similarity_scale;   // scalar w
  Tensor similarity_bias;    // scalar b

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  // Overwrites all values from a flat array in declaration order.
  void assign(std::span<const double> flat);
};

// Glorot-uniform weights, zero biases, w = 10 and b = -5.
EncoderParams init_params(const EncoderConfig& config, Rng& rng);

// Parameters registered as graph leaves.
struct BoundEncoder {
  std::vector<Var> leaves;  // declaration order
  std::vector<Var> layer_weights;
  std::vector<Var> layer_biases;
  Var attention_weight, attention_bias, attention_context;
  Var output_weight, output_bias;
  SimilarityParams similarity;
};

BoundEncoder bind(Graph& graph, const EncoderParams& params, bool trainable);

// Embeds `items` stacked utterances, each `frames_per_item` rows of F
// features: (items * T) x F -> items x D.
Var encode_batch(const BoundEncoder& encoder, const EncoderConfig& config,
                 Var frames, std::size_t frames_per_item);

// Single utterance T x F -> 1 x D, outside any caller graph.
Tensor encode(const Tensor& frames, const EncoderParams& params,
              const EncoderConfig& config);

// SAP attention weights over the T frames of one utterance (T x 1).
Tensor sap_attention(const Tensor& frames, const EncoderParams& params,
                     const EncoderConfig& config);

}  // namespace cmix

#endif  // CMIX_ENCODER_HPP_
