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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qrnn/autograd.hpp"
#include "qrnn/layers.hpp"
#include "qrnn/quaternion.hpp"

namespace qrnn {

// Gate order used everywhere: forget, input, candidate, output.
enum Gate : std::size_t { kForget = 0, kInput = 1, kCandidate = 2, kOutput = 3 };
inline constexpr std::array<const char*, 4> kGateNames = {"f", "i", "c", "o"};

// A cell's affine maps lowered to real matrices on a Graph. Once bound, the
// quaternion and real cells run the same real recurrences: split activations
// and split gating are element-wise on the split-layout vector.
struct GateMaps {
  std::array<BoundLinear, 4> input;
  std::array<BoundLinear, 4> recurrent;
  std::array<Var, 4> bias;
};

struct GraphState {
  Var h;  // [batch x hidden_width]
  Var c;
};

// Quaternion LSTM: every affine map is a QuaternionLinear (Hamilton products),
// gates act component-wise.
class QLSTMCell {
 public:
  QLSTMCell() = default;
  QLSTMCell(std::size_t input_q, std::size_t hidden_q, std::uint64_t seed);

  std::size_t input_q() const { return input_q_; }
  std::size_t hidden_q() const { return hidden_q_; }
  std::size_t input_width() const { return 4 * input_q_; }
  std::size_t hidden_width() const { return 4 * hidden_q_; }

  std::array<QuaternionLinear, 4> w;  // input -> hidden
  std::array<QuaternionLinear, 4> r;  // hidden -> hidden
  std::array<Parameter, 4> b;         // [4 hidden_q] split layout

  GateMaps bind(Graph& g);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t param_count() const;

 private:
  std::size_t input_q_ = 0;
  std::size_t hidden_q_ = 0;
};

class LSTMCell {
 public:
  LSTMCell() = default;
  LSTMCell(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed);

  std::size_t input_width() const { return input_dim_; }
  std::size_t hidden_width() const { return hidden_dim_; }

  std::array<RealLinear, 4> w;
  std::array<RealLinear, 4> r;
  std::array<Parameter, 4> b;  // [hidden]

  GateMaps bind(Graph& g);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t param_count() const;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
};

// --- graph route (batched, differentiable) --------------------------------

GraphState zero_state(Graph& g, std::size_t batch, std::size_t hidden_width);
GraphState graph_step(Graph& g, const GateMaps& maps, Var x, const GraphState& prev);
// Left-to-right fold of graph_step; returns one state per input.
std::vector<GraphState> unroll(Graph& g, const GateMaps& maps, std::span<const Var> xs,
                               GraphState init);
// h_fwd[t] + h_bwd[t], the backward cell reading the sequence reversed.
std::vector<Var> bidirectional_unroll(Graph& g, const GateMaps& fwd, const GateMaps& bwd,
                                      std::span<const Var> xs, std::size_t hidden_width);

// --- direct route (single example, quaternion-native) ---------------------

struct QLSTMState {
  QuaternionVector h;
  QuaternionVector c;

  static QLSTMState zeros(std::size_t hidden_q) {
    return {QuaternionVector(hidden_q), QuaternionVector(hidden_q)};
  }
};

struct LSTMState {
  std::vector<double> h;
  std::vector<double> c;

  static LSTMState zeros(std::size_t hidden) {
    return {std::vector<double>(hidden), std::vector<double>(hidden)};
  }
};

// Throws ShapeError on size mismatch and DivergenceError on a non-finite state.
QLSTMState qlstm_step(const QLSTMCell& cell, const QuaternionVector& x, const QLSTMState& prev);
LSTMState lstm_step(const LSTMCell& cell, std::span<const double> x, const LSTMState& prev);

std::vector<QLSTMState> run_sequence(const QLSTMCell& cell, std::span<const QuaternionVector> xs,
                                     QLSTMState init);
std::vector<LSTMState> run_sequence(const LSTMCell& cell,
                                    std::span<const std::vector<double>> xs, LSTMState init);

// Throws ShapeError if the two cells' hidden sizes differ.
std::vector<QuaternionVector> bidirectional_run(const QLSTMCell& fwd, const QLSTMCell& bwd,
                                                std::span<const QuaternionVector> xs);
std::vector<std::vector<double>> bidirectional_run(const LSTMCell& fwd, const LSTMCell& bwd,
                                                   std::span<const std::vector<double>> xs);

}  // namespace qrnn
