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
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qrnn/autograd.hpp"
#include "qrnn/layers.hpp"
#include "qrnn/quaternion.hpp"
#include "qrnn/recurrent.hpp"
#include "qrnn/rng.hpp"

namespace qrnn {

// Sequence layout: [payload L | blank T | delimiter | blank L], with the
// payload expected back on the final L steps.
struct CopyTaskSpec {
  std::size_t seq_len = 10;    // L
  std::size_t blank_len = 10;  // T

  static constexpr int n_symbols = 8;
  static constexpr int blank_id = 8;
  static constexpr int delimiter_id = 9;
  static constexpr std::size_t input_channels = 10;
  static constexpr std::size_t output_classes = 9;

  std::size_t steps() const { return 2 * seq_len + blank_len + 1; }
  // First step whose target is a payload symbol.
  std::size_t recall_start() const { return seq_len + blank_len + 1; }
};

struct CopyBatch {
  CopyTaskSpec spec;
  std::size_t batch = 0;
  std::vector<int> input_ids;  // [batch x steps], values 0..9
  std::vector<int> targets;    // [batch x steps], values 0..8
  Tensor inputs;               // [batch x steps x 10] one-hot

  int input_id(std::size_t b, std::size_t t) const { return input_ids[b * spec.steps() + t]; }
  int target(std::size_t b, std::size_t t) const { return targets[b * spec.steps() + t]; }
};

// Lays out one example from its payload (size L, symbols 0..7).
void layout_example(const CopyTaskSpec& spec, std::span<const int> payload,
                    std::span<int> input_ids, std::span<int> targets);

// Payload symbols are drawn from `rng` example by example, position by position.
CopyBatch generate_batch(const CopyTaskSpec& spec, std::size_t batch, Rng& rng);
// The stream used for training epoch `epoch` of run `seed`.
CopyBatch generate_batch(const CopyTaskSpec& spec, std::size_t batch, std::uint64_t seed,
                         std::uint64_t epoch);

// One-hot 10-channel step -> 3 quaternions (zero-padded to 12 reals, read in
// split layout).
QuaternionVector pad_to_quaternions(std::span<const double> channels);
std::vector<double> unpad_from_quaternions(const QuaternionVector& v);

struct CopyMetrics {
  double loss = 0.0;
  double accuracy_recall = 0.0;
  double accuracy_full = 0.0;
};

// Accuracy of per-step predictions ([batch x steps]); loss is left at 0.
CopyMetrics score_predictions(const CopyBatch& batch, std::span<const int> predictions);

enum class ModelKind { qlstm, lstm };

std::string to_string(ModelKind kind);
// Throws InputError for anything but "qlstm" or "lstm".
ModelKind parse_model_kind(const std::string& text);

// Recurrent cell followed by a real-valued output layer with one logit per
// output class. QLSTM inputs are padded to 3 quaternions per step.
class CopyModel {
 public:
  CopyModel() = default;
  // hidden counts quaternion units for qlstm and real units for lstm.
  CopyModel(ModelKind kind, std::size_t hidden, std::uint64_t seed);

  ModelKind kind() const { return kind_; }
  std::size_t hidden_units() const { return hidden_; }
  std::size_t input_width() const;
  std::size_t hidden_width() const;

  std::variant<QLSTMCell, LSTMCell> cell;
  RealLinear head;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t param_count() const;

  GateMaps bind_cell(Graph& g);
  // Per-step input matrices [batch x input_width()].
  std::vector<Var> step_inputs(Graph& g, const CopyBatch& batch) const;
  // Logits [(steps * batch) x 9], rows ordered step-major (row = t * batch + b).
  Var forward(Graph& g, const CopyBatch& batch);

 private:
  ModelKind kind_ = ModelKind::qlstm;
  std::size_t hidden_ = 0;
};

// Targets in the step-major row order used by CopyModel::forward.
std::vector<int> step_major_targets(const CopyBatch& batch);

// Forward pass without gradient recording; loss over all steps plus both
// accuracies.
CopyMetrics evaluate(CopyModel& model, const CopyBatch& batch);

// Metrics from step-major logits (as produced by CopyModel::forward).
CopyMetrics metrics_from_logits(const CopyBatch& batch, const Tensor& logits, double loss);

}  // namespace qrnn
