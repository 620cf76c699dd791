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

#ifndef CMIX_GRAPH_HPP_
#define CMIX_GRAPH_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cmix/tensor.hpp"

namespace cmix {

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while the graph is
// alive.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  std::span<const double> grad() const;
};

// Eager reverse-mode tape. Every op evaluates immediately and appends one
// node, so node order is a topological order by construction. A graph is
// confined to a single thread.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf holding an input or a trainable parameter.
  Var leaf(Tensor value, bool requires_grad);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  // Value of the terminal (last recorded) node.
  const Tensor& forward() const;

  // Accumulates d(terminal)/d(node) into every node that requires grad.
  // Grads from a previous call are cleared first.
  void backward(Var terminal);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  std::span<const double> grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::string_view op_name(std::size_t id) const { return nodes_[id].op; }
  const std::vector<std::size_t>& inputs(std::size_t id) const {
    return nodes_[id].inputs;
  }
  std::size_t size() const { return nodes_.size(); }

  // For op implementations. `record` validates that the result is finite and
  // returns the new node.
  Var record(std::string_view op, std::vector<std::size_t> inputs,
             Tensor value, BackwardFn backward);
  // Gradient buffer of `id`, or an empty span if the node needs no grad.
  std::span<double> grad_buffer(std::size_t id);
  // Upstream gradient flowing into node `id` during backward.
  std::span<const double> upstream(std::size_t id) const;

 private:
  struct Node {
    std::string_view op;
    std::vector<std::size_t> inputs;
    Tensor value;
    std::vector<double> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
};

}  // namespace cmix

#endif  // CMIX_GRAPH_HPP_
