/*
 * Copyright 2026 The qrnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qrnn/tensor.hpp"

namespace qrnn {

// Handle to a node recorded on a Graph.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
  bool valid() const { return id != static_cast<std::size_t>(-1); }
};

// Record-and-replay reverse-mode tape over real tensor ops. Nodes are
// appended in evaluation order, so replaying them backwards is a valid
// topological order. A Graph is single-use: build, backward once, discard.
class Graph {
 public:
  // With record_grad = false no backward closures are stored (inference).
  explicit Graph(bool record_grad = true) : record_grad_(record_grad) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value, bool requires_grad = false);
  // Leaf bound to p; backward accumulates into p.grad.
  Var param(Parameter& p);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  // Gradient of the last backward() target with respect to v.
  const Tensor& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  bool recording() const { return record_grad_; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 (scaled by `seed`) and replays the tape.
  // Throws StateError if loss is not a recorded scalar or backward already ran.
  void backward(Var loss, double seed = 1.0);

  // Op construction interface. `backprop` receives the graph and the
  // output gradient and must accumulate into its inputs via grad_buffer().
  using Backprop = std::function<void(Graph&, const Tensor& out_grad)>;
  Var record(Tensor value, std::span<const Var> inputs, Backprop backprop);
  Tensor& grad_buffer(Var v);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backprop backprop;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  bool record_grad_;
  bool backward_done_ = false;
  std::vector<Node> nodes_;
};

namespace ops {

// a[R x K] * b[C x K]^T -> [R x C]
Var matmul_nt(Graph& g, Var a, Var b);
Var add(Graph& g, Var a, Var b);
// a[R x C] + bias[C] broadcast over rows
Var add_row(Graph& g, Var a, Var bias);
Var mul(Graph& g, Var a, Var b);
Var sigmoid(Graph& g, Var a);
Var tanh(Graph& g, Var a);
Var sum(Graph& g, Var a);
// Stacks equal-width matrices vertically.
Var concat_rows(Graph& g, std::span<const Var> parts);
// blocks[4 x M x N] quaternion weight planes -> structured real matrix [4M x 4N].
Var assemble_quaternion(Graph& g, Var blocks);
// Mean over rows of -log softmax(logits[row])[targets[row]]. Throws
// InputError for a target outside [0, K).
Var cross_entropy(Graph& g, Var logits, std::span<const int> targets);

}  // namespace ops

double sigmoid(double x);

}  // namespace qrnn
