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

#include "cmix/encoder.hpp"

#include <cmath>

#include "cmix/errors.hpp"
#include "cmix/ops.hpp"

namespace cmix {
namespace {

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-s, s);
  Tensor t = Tensor::zeros({fan_in, fan_out});
  for (double& v : t.values) v = u(rng);
  return t;
}

Var activate(Var x, Activation a) {
  return a == Activation::kRelu ? ops::relu(x) : ops::tanh(x);
}

// Frame-level hidden sequence (rows x H).
Var hidden_frames(const BoundEncoder& enc, const EncoderConfig& config,
                  Var frames) {
  Var h = frames;
  for (std::size_t l = 0; l < config.hidden_dims.size(); ++l) {
    h = activate(ops::add_row_bias(ops::matmul(h, enc.layer_weights[l]),
                                   enc.layer_biases[l]),
                 config.activation);
  }
  return h;
}

Var attention(const BoundEncoder& enc, Var hidden, std::size_t frames_per_item) {
  Var proj = ops::tanh(ops::add_row_bias(
      ops::matmul(hidden, enc.attention_weight), enc.attention_bias));
  Var scores = ops::matmul(proj, enc.attention_context);
  return ops::segment_softmax(scores, frames_per_item);
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + name + "' (expected relu or tanh)");
}

Pooling parse_pooling(const std::string& name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "sap") return Pooling::kSap;
  throw ConfigError("unknown pooling '" + name + "' (expected mean or sap)");
}

std::string to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

std::string to_string(Pooling p) { return p == Pooling::kMean ? "mean" : "sap"; }

void EncoderConfig::validate() const {
  if (input_dim == 0) throw ConfigError("encoder input_dim must be positive");
  if (hidden_dims.empty()) {
    throw ConfigError("encoder needs at least one hidden layer");
  }
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw ConfigError("hidden layer widths must be positive");
  }
  if (embedding_dim < 2) throw ConfigError("embedding_dim must be >= 2");
}

std::vector<Tensor*> EncoderParams::tensors() {
  std::vector<Tensor*> out;
  for (std::size_t l = 0; l < layer_weights.size(); ++l) {
    out.push_back(&layer_weights[l]);
    out.push_back(&layer_biases[l]);
  }
  for (Tensor* t : {&attention_weight, &attention_bias, &attention_context,
                    &output_weight, &output_bias, &similarity_scale,
                    &similarity_bias}) {
    out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> EncoderParams::tensors() const {
  auto mut = const_cast<EncoderParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

std::vector<double> EncoderParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Tensor* t : tensors()) {
    flat.insert(flat.end(), t->values.begin(), t->values.end());
  }
  return flat;
}

void EncoderParams::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ContractError("EncoderParams::assign: expected " +
                        std::to_string(parameter_count()) + " values, got " +
                        std::to_string(flat.size()));
  }
  std::size_t offset = 0;
  for (Tensor* t : tensors()) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), t->size(),
                t->values.begin());
    offset += t->size();
  }
}

EncoderParams init_params(const EncoderConfig& config, Rng& rng) {
  config.validate();
  EncoderParams p;
  std::size_t in = config.input_dim;
  for (std::size_t h : config.hidden_dims) {
    p.layer_weights.push_back(glorot(in, h, rng));
    p.layer_biases.push_back(Tensor::zeros({1, h}));
    in = h;
  }
  const std::size_t hdim = config.pooled_dim();
  p.attention_weight = glorot(hdim, hdim, rng);
  p.attention_bias = Tensor::zeros({1, hdim});
  p.attention_context = glorot(hdim, 1, rng);
  p.output_weight = glorot(hdim, config.embedding_dim, rng);
  p.output_bias = Tensor::zeros({1, config.embedding_dim});
  p.similarity_scale = Tensor::scalar(kInitialSimilarityScale);
  p.similarity_bias = Tensor::scalar(kInitialSimilarityBias);
  return p;
}

BoundEncoder bind(Graph& graph, const EncoderParams& params, bool trainable) {
  BoundEncoder b;
  for (const Tensor* t : params.tensors()) {
    b.leaves.push_back(graph.leaf(*t, trainable));
  }
  std::size_t i = 0;
  for (std::size_t l = 0; l < params.layer_weights.size(); ++l) {
    b.layer_weights.push_back(b.leaves[i++]);
    b.layer_biases.push_back(b.leaves[i++]);
  }
  b.attention_weight = b.leaves[i++];
  b.attention_bias = b.leaves[i++];
  b.attention_context = b.leaves[i++];
  b.output_weight = b.leaves[i++];
  b.output_bias = b.leaves[i++];
  b.similarity.w = b.leaves[i++];
  b.similarity.b = b.leaves[i++];
  return b;
}

Var encode_batch(const BoundEncoder& encoder, const EncoderConfig& config,
                 Var frames, std::size_t frames_per_item) {
  const Tensor& f = frames.value();
  if (frames_per_item == 0 || !f.is_matrix() ||
      f.rows() % frames_per_item != 0) {
    throw ContractError("encode: need T >= 1 frames per utterance and a "
                        "whole number of utterances");
  }
  if (f.cols() != config.input_dim) {
    throw ContractError("encode: frames have " + std::to_string(f.cols()) +
                        " features, encoder expects " +
                        std::to_string(config.input_dim));
  }
  Var hidden = hidden_frames(encoder, config, frames);
  Var pooled = config.pooling == Pooling::kMean
                   ? ops::segment_mean(hidden, frames_per_item)
                   : ops::segment_weighted_sum(
                         hidden, attention(encoder, hidden, frames_per_item),
                         frames_per_item);
  return ops::add_row_bias(ops::matmul(pooled, encoder.output_weight),
                           encoder.output_bias);
}

Tensor encode(const Tensor& frames, const EncoderParams& params,
              const EncoderConfig& config) {
  if (!frames.is_matrix() || frames.rows() == 0) {
    throw ContractError("encode: need T >= 1 frames");
  }
  Graph g;
  BoundEncoder enc = bind(g, params, false);
  Var x = g.constant(frames);
  return encode_batch(enc, config, x, frames.rows()).value();
}

Tensor sap_attention(const Tensor& frames, const EncoderParams& params,
                     const EncoderConfig& config) {
  Graph g;
  BoundEncoder enc = bind(g, params, false);
  Var x = g.constant(frames);
  return attention(enc, hidden_frames(enc, config, x), frames.rows()).value();
}

}  // namespace cmix
