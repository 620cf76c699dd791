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

#include "cmix/graph.hpp"

#include <cmath>
#include <string>

#include "cmix/errors.hpp"

namespace cmix {

const Tensor& Var::value() const { return graph->value(id); }
std::span<const double> Var::grad() const { return graph->grad(id); }

Var Graph::leaf(Tensor value, bool requires_grad) {
  if (!value.all_finite()) {
    throw NumericError("leaf node #" + std::to_string(nodes_.size()) +
                       " holds a non-finite value");
  }
  Node n;
  n.op = "leaf";
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Graph::record(std::string_view op, std::vector<std::size_t> inputs,
                  Tensor value, BackwardFn backward) {
  std::size_t id = nodes_.size();
  for (std::size_t in : inputs) {
    if (in >= id) {
      throw ContractError(std::string(op) + " node #" + std::to_string(id) +
                          ": input #" + std::to_string(in) +
                          " does not precede it");
    }
  }
  if (!value.all_finite()) {
    throw NumericError(std::string(op) + " node #" + std::to_string(id) +
                       " produced a non-finite value");
  }
  Node n;
  n.op = op;
  n.requires_grad = false;
  for (std::size_t in : inputs) n.requires_grad |= nodes_[in].requires_grad;
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, id};
}

const Tensor& Graph::forward() const {
  if (nodes_.empty()) throw ContractError("forward: empty graph");
  return nodes_.back().value;
}

void Graph::backward(Var terminal) {
  if (terminal.graph != this || terminal.id >= nodes_.size()) {
    throw ContractError("backward: terminal does not belong to this graph");
  }
  if (nodes_[terminal.id].value.size() != 1) {
    throw ContractError("backward: terminal node #" +
                        std::to_string(terminal.id) + " is not scalar (" +
                        shape_string(nodes_[terminal.id].value.shape) + ")");
  }
  for (Node& n : nodes_) {
    if (n.requires_grad) {
      n.grad.assign(n.value.size(), 0.0);
    } else {
      n.grad.clear();
    }
  }
  if (!nodes_[terminal.id].requires_grad) return;
  nodes_[terminal.id].grad[0] = 1.0;
  for (std::size_t i = terminal.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward) continue;
    n.backward(*this, i);
  }
  for (std::size_t i = 0; i <= terminal.id; ++i) {
    for (double g : nodes_[i].grad) {
      if (!std::isfinite(g)) {
        throw NumericError(std::string(nodes_[i].op) + " node #" +
                           std::to_string(i) + " received a non-finite grad");
      }
    }
  }
}

std::span<const double> Graph::grad(std::size_t id) const {
  return nodes_[id].grad;
}

std::span<double> Graph::grad_buffer(std::size_t id) {
  return nodes_[id].grad;
}

std::span<const double> Graph::upstream(std::size_t id) const {
  return nodes_[id].grad;
}

}  // namespace cmix
