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

#include "qrnn/training.hpp"

#include <algorithm>
#include <cmath>

#include "qrnn/rng.hpp"

namespace qrnn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw InputError("Adam betas must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw InputError("Adam epsilon must be positive");
  if (epochs < 1) throw InputError("epochs must be at least 1");
  if (batch_size < 1) throw InputError("batch size must be at least 1");
  if (clip_norm < 0.0) throw InputError("clip norm must be non-negative");
  if (anneal && !(anneal->halving_factor > 0.0 && anneal->halving_factor < 1.0)) {
    throw InputError("annealing factor must lie in (0, 1)");
  }
}

void adam_update(std::span<Parameter* const> params, const TrainConfig& config,
                 AdamState& state) {
  for (const Parameter* p : params) {
    if (!p->has_grad) {
      throw StateError("adam_update: parameter '" + p->name + "' has no gradient");
    }
  }
  if (state.m.size() != params.size()) {
    state.m.clear();
    state.v.clear();
    for (const Parameter* p : params) {
      state.m.emplace_back(p->value.shape());
      state.v.emplace_back(p->value.shape());
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  const double step_size = config.learning_rate * state.lr_scale / bc1;
  const double bc2_sqrt = std::sqrt(bc2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& w = params[k]->value.raw();
    const auto& g = params[k]->grad.raw();
    auto& m = state.m[k].raw();
    auto& v = state.v[k].raw();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
      w[j] -= step_size * m[j] / (std::sqrt(v[j]) / bc2_sqrt + config.epsilon);
    }
  }
}

void clip_gradients(std::span<Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.raw()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (Parameter* p : params)
    for (double& g : p->grad.raw()) g *= scale;
}

TrainState init_training(ModelKind kind, std::size_t hidden, const CopyTaskSpec& spec,
                         const TrainConfig& config) {
  config.validate();
  TrainState s;
  s.model = CopyModel(kind, hidden, config.seed);
  s.spec = spec;
  s.config = config;
  return s;
}

MetricsRecord train_epoch(TrainState& state) {
  const std::size_t epoch = state.epoch + 1;
  const CopyBatch batch =
      generate_batch(state.spec, state.config.batch_size, state.config.seed, epoch);
  auto params = state.model.parameters();
  for (Parameter* p : params) p->zero_grad();

  Graph g;
  const Var logits = state.model.forward(g, batch);
  const auto targets = step_major_targets(batch);
  const Var loss = ops::cross_entropy(g, logits, targets);
  const double loss_value = g.value(loss)[0];
  if (!std::isfinite(loss_value)) {
    throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch));
  }
  const CopyMetrics m = metrics_from_logits(batch, g.value(logits), loss_value);
  g.backward(loss);

  if (state.config.clip_norm > 0.0) clip_gradients(params, state.config.clip_norm);

  // Update a copy so a divergent step leaves `state` at its last good value.
  AdamState adam = state.adam;
  std::vector<Tensor> before;
  before.reserve(params.size());
  for (const Parameter* p : params) before.push_back(p->value);
  adam_update(params, state.config, adam);
  const bool finite =
      std::all_of(params.begin(), params.end(), [](const Parameter* p) { return p->value.all_finite(); });
  if (!finite) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = before[k];
    throw DivergenceError("non-finite parameters after update at epoch " + std::to_string(epoch));
  }
  state.adam = std::move(adam);

  if (state.config.anneal) {
    AdamState& a = state.adam;
    if (epoch == 1 || loss_value < a.best_loss) {
      a.best_loss = loss_value;
      a.epochs_since_best = 0;
    } else if (++a.epochs_since_best >= state.config.anneal->patience) {
      a.lr_scale *= state.config.anneal->halving_factor;
      a.epochs_since_best = 0;
    }
  }
  state.epoch = epoch;
  return {epoch, m.loss, m.accuracy_recall, m.accuracy_full};
}

std::vector<MetricsRecord> run_training(TrainState& state, const EpochCallback& on_epoch) {
  state.config.validate();
  std::vector<MetricsRecord> records;
  while (state.epoch < state.config.epochs) {
    try {
      records.push_back(train_epoch(state));
    } catch (const DivergenceError& e) {
      throw TrainingDiverged(e.what(), std::make_shared<const TrainState>(state),
                             std::move(records));
    }
    if (on_epoch) on_epoch(records.back(), state);
  }
  return records;
}

TrainResult train_copy_task(ModelKind kind, std::size_t hidden, const CopyTaskSpec& spec,
                            const TrainConfig& config, const EpochCallback& on_epoch) {
  TrainResult r{{}, init_training(kind, hidden, spec, config)};
  r.records = run_training(r.state, on_epoch);
  return r;
}

// --- gradient checking ---------------------------------------------------

std::vector<std::string> GradCheckReport::flagged() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.flagged) out.push_back(e.name);
  return out;
}

GradCheckReport grad_check(std::span<Parameter* const> params,
                           const std::function<double()>& loss,
                           const std::function<void()>& compute_grads, double h,
                           double tolerance) {
  compute_grads();
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const Parameter* p : params) analytic.push_back(p->grad);

  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    GradCheckEntry e;
    e.name = p.name;
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double saved = p.value[j];
      p.value[j] = saved + h;
      const double up = loss();
      p.value[j] = saved - h;
      const double down = loss();
      p.value[j] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k][j];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
      if (rel > e.max_rel_error || j == 0) {
        e.max_rel_error = rel;
        e.worst_index = j;
        e.analytic = a;
        e.numeric = numeric;
      }
    }
    e.flagged = !(e.max_rel_error < tolerance);
    report.max_rel_error = std::max(report.max_rel_error, e.max_rel_error);
    report.entries.push_back(std::move(e));
  }
  return report;
}

GradCheckReport grad_check_model(ModelKind kind, std::size_t hidden, std::size_t timesteps,
                                 std::uint64_t seed, double h, double tolerance) {
  constexpr std::size_t kBatch = 2;
  CopyModel model(kind, hidden, seed);
  // Random (non-one-hot) inputs and non-zero biases so every parameter sees
  // a non-trivial gradient.
  Rng rng{lo32(seed), hi32(seed), 7u};
  for (Parameter* p : model.parameters())
    if (p->name.starts_with("b_") || p->name == "head.bias")
      for (double& v : p->value.raw()) v = rng.uniform(-0.5, 0.5);
  std::vector<Tensor> inputs;
  for (std::size_t t = 0; t < timesteps; ++t) {
    Tensor x = Tensor::matrix(kBatch, model.input_width());
    for (double& v : x.raw()) v = rng.uniform(-1.0, 1.0);
    inputs.push_back(std::move(x));
  }
  std::vector<int> targets(timesteps * kBatch);
  for (int& t : targets) t = static_cast<int>(rng.below(CopyTaskSpec::output_classes));

  auto forward = [&](Graph& g) {
    const GateMaps maps = model.bind_cell(g);
    const BoundLinear out = model.head.bind(g);
    std::vector<Var> xs;
    for (const Tensor& x : inputs) xs.push_back(g.constant(x));
    const auto states = unroll(g, maps, xs, zero_state(g, kBatch, model.hidden_width()));
    std::vector<Var> hs;
    for (const auto& s : states) hs.push_back(s.h);
    return ops::cross_entropy(g, apply(g, out, ops::concat_rows(g, hs)), targets);
  };
  auto params = model.parameters();
  return grad_check(
      params,
      [&] {
        Graph g(false);
        return g.value(forward(g))[0];
      },
      [&] {
        for (Parameter* p : params) p->zero_grad();
        Graph g;
        g.backward(forward(g));
      },
      h, tolerance);
}

}  // namespace qrnn
