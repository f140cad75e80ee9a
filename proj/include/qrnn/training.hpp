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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrnn/copy_task.hpp"
#include "qrnn/errors.hpp"
#include "qrnn/tensor.hpp"

namespace qrnn {

// Halve-on-plateau learning-rate schedule.
struct AnnealConfig {
  double halving_factor = 0.5;
  std::size_t patience = 1;  // epochs without a loss improvement before halving
};

struct TrainConfig {
  double learning_rate = 5e-3;
  std::size_t epochs = 2000;
  std::size_t batch_size = 10;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  double clip_norm = 0.0;  // global gradient-norm clip; 0 disables
  std::optional<AnnealConfig> anneal;

  // Throws InputError when a field is out of range.
  void validate() const;
};

struct AdamState {
  std::uint64_t step = 0;
  double lr_scale = 1.0;
  double best_loss = 0.0;
  std::size_t epochs_since_best = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

// One bias-corrected Adam update over `params` using their current grads.
// Throws StateError if any parameter has no gradient since its last zero_grad.
void adam_update(std::span<Parameter* const> params, const TrainConfig& config,
                 AdamState& state);

// Scales all gradients so their global L2 norm is at most max_norm.
void clip_gradients(std::span<Parameter* const> params, double max_norm);

struct MetricsRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy_recall = 0.0;
  double accuracy_full = 0.0;
};

// Everything needed to continue a run bit-for-bit.
struct TrainState {
  CopyModel model;
  AdamState adam;
  CopyTaskSpec spec;
  TrainConfig config;
  std::size_t epoch = 0;  // epochs completed
};

TrainState init_training(ModelKind kind, std::size_t hidden, const CopyTaskSpec& spec,
                         const TrainConfig& config);

// Runs one epoch: fresh batch, forward, metrics, backward, Adam step.
// Throws DivergenceError (state untouched) if the loss or an update is
// non-finite.
MetricsRecord train_epoch(TrainState& state);

class TrainingDiverged : public DivergenceError {
 public:
  TrainingDiverged(const std::string& what, std::shared_ptr<const TrainState> last_good,
                   std::vector<MetricsRecord> records)
      : DivergenceError(what), last_good(std::move(last_good)), records(std::move(records)) {}

  std::shared_ptr<const TrainState> last_good;
  std::vector<MetricsRecord> records;
};

using EpochCallback = std::function<void(const MetricsRecord&, const TrainState&)>;

// Trains until state.epoch == state.config.epochs. Throws TrainingDiverged
// carrying the last good state and the records produced so far.
std::vector<MetricsRecord> run_training(TrainState& state, const EpochCallback& on_epoch = {});

struct TrainResult {
  std::vector<MetricsRecord> records;
  TrainState state;
};

TrainResult train_copy_task(ModelKind kind, std::size_t hidden, const CopyTaskSpec& spec,
                            const TrainConfig& config, const EpochCallback& on_epoch = {});

// --- gradient checking ---------------------------------------------------

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  bool flagged = false;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<GradCheckEntry> entries;

  std::vector<std::string> flagged() const;
  bool passed() const { return flagged().empty(); }
};

// Central differences (f(p + h) - f(p - h)) / 2h for every scalar of every
// parameter, compared with the gradient that `compute_grads` leaves in
// p->grad. Relative error uses max(|a|, |n|, 1e-12) as denominator; entries
// whose error exceeds `tolerance` are flagged.
GradCheckReport grad_check(std::span<Parameter* const> params,
                           const std::function<double()>& loss,
                           const std::function<void()>& compute_grads, double h,
                           double tolerance);

// Gradient check of a copy-task-shaped model on random real inputs and random
// targets over `timesteps` steps.
GradCheckReport grad_check_model(ModelKind kind, std::size_t hidden, std::size_t timesteps,
                                 std::uint64_t seed, double h, double tolerance);

}  // namespace qrnn
