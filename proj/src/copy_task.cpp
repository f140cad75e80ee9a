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

#include "qrnn/copy_task.hpp"

#include <algorithm>

#include "qrnn/errors.hpp"

namespace qrnn {

void layout_example(const CopyTaskSpec& spec, std::span<const int> payload,
                    std::span<int> input_ids, std::span<int> targets) {
  const std::size_t L = spec.seq_len;
  std::fill(input_ids.begin(), input_ids.end(), CopyTaskSpec::blank_id);
  std::fill(targets.begin(), targets.end(), CopyTaskSpec::blank_id);
  for (std::size_t j = 0; j < L; ++j) {
    input_ids[j] = payload[j];
    targets[spec.recall_start() + j] = payload[j];
  }
  input_ids[L + spec.blank_len] = CopyTaskSpec::delimiter_id;
}

CopyBatch generate_batch(const CopyTaskSpec& spec, std::size_t batch, Rng& rng) {
  if (batch == 0 || spec.seq_len == 0) throw InputError("copy task needs batch >= 1 and L >= 1");
  CopyBatch out;
  out.spec = spec;
  out.batch = batch;
  const std::size_t steps = spec.steps();
  out.input_ids.resize(batch * steps);
  out.targets.resize(batch * steps);
  out.inputs = Tensor({batch, steps, CopyTaskSpec::input_channels});
  std::vector<int> payload(spec.seq_len);
  for (std::size_t b = 0; b < batch; ++b) {
    for (int& s : payload) s = static_cast<int>(rng.below(CopyTaskSpec::n_symbols));
    layout_example(spec, payload, std::span(out.input_ids).subspan(b * steps, steps),
                   std::span(out.targets).subspan(b * steps, steps));
    for (std::size_t t = 0; t < steps; ++t) {
      const auto id = static_cast<std::size_t>(out.input_id(b, t));
      out.inputs[(b * steps + t) * CopyTaskSpec::input_channels + id] = 1.0;
    }
  }
  return out;
}

CopyBatch generate_batch(const CopyTaskSpec& spec, std::size_t batch, std::uint64_t seed,
                         std::uint64_t epoch) {
  Rng rng{lo32(seed), hi32(seed), lo32(epoch), hi32(epoch)};
  return generate_batch(spec, batch, rng);
}

QuaternionVector pad_to_quaternions(std::span<const double> channels) {
  if (channels.size() != CopyTaskSpec::input_channels) {
    throw ShapeError("pad_to_quaternions: expected 10 channels, got " +
                     std::to_string(channels.size()));
  }
  std::vector<double> padded(channels.begin(), channels.end());
  padded.resize(12, 0.0);
  return QuaternionVector::from_components(std::move(padded));
}

std::vector<double> unpad_from_quaternions(const QuaternionVector& v) {
  if (v.n_quats() != 3) throw ShapeError("unpad_from_quaternions: expected 3 quaternions");
  return {v.raw().begin(), v.raw().begin() + CopyTaskSpec::input_channels};
}

CopyMetrics score_predictions(const CopyBatch& batch, std::span<const int> predictions) {
  const std::size_t steps = batch.spec.steps();
  if (predictions.size() != batch.batch * steps) {
    throw ShapeError("score_predictions: expected " + std::to_string(batch.batch * steps) +
                     " predictions");
  }
  std::size_t hit_all = 0, hit_recall = 0;
  for (std::size_t b = 0; b < batch.batch; ++b) {
    for (std::size_t t = 0; t < steps; ++t) {
      const bool hit = predictions[b * steps + t] == batch.target(b, t);
      hit_all += hit;
      if (t >= batch.spec.recall_start()) hit_recall += hit;
    }
  }
  CopyMetrics m;
  m.accuracy_full = static_cast<double>(hit_all) / static_cast<double>(batch.batch * steps);
  m.accuracy_recall =
      static_cast<double>(hit_recall) / static_cast<double>(batch.batch * batch.spec.seq_len);
  return m;
}

std::string to_string(ModelKind kind) { return kind == ModelKind::qlstm ? "qlstm" : "lstm"; }

ModelKind parse_model_kind(const std::string& text) {
  if (text == "qlstm") return ModelKind::qlstm;
  if (text == "lstm") return ModelKind::lstm;
  throw InputError("unknown model kind '" + text + "' (expected qlstm or lstm)");
}

// --- CopyModel -----------------------------------------------------------

namespace {
constexpr std::size_t kQuaternionInputs = 3;  // 10 channels padded to 12 reals
}

CopyModel::CopyModel(ModelKind kind, std::size_t hidden, std::uint64_t seed)
    : kind_(kind), hidden_(hidden) {
  if (hidden == 0) throw InputError("hidden size must be positive");
  if (kind == ModelKind::qlstm) {
    cell = QLSTMCell(kQuaternionInputs, hidden, derive_seed(seed, 100));
  } else {
    cell = LSTMCell(CopyTaskSpec::input_channels, hidden, derive_seed(seed, 100));
  }
  head = RealLinear(hidden_width(), CopyTaskSpec::output_classes, true, derive_seed(seed, 200));
  head.weight.name = "head.weight";
  head.bias->name = "head.bias";
}

std::size_t CopyModel::input_width() const {
  return std::visit([](const auto& c) { return c.input_width(); }, cell);
}

std::size_t CopyModel::hidden_width() const {
  return std::visit([](const auto& c) { return c.hidden_width(); }, cell);
}

std::vector<Parameter*> CopyModel::parameters() {
  auto out = std::visit([](auto& c) { return c.parameters(); }, cell);
  for (Parameter* p : head.parameters()) out.push_back(p);
  return out;
}

std::vector<const Parameter*> CopyModel::parameters() const {
  auto out = std::visit([](const auto& c) { return c.parameters(); }, cell);
  for (const Parameter* p : head.parameters()) out.push_back(p);
  return out;
}

std::size_t CopyModel::param_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

GateMaps CopyModel::bind_cell(Graph& g) {
  return std::visit([&g](auto& c) { return c.bind(g); }, cell);
}

std::vector<Var> CopyModel::step_inputs(Graph& g, const CopyBatch& batch) const {
  const std::size_t steps = batch.spec.steps();
  const std::size_t width = input_width();
  std::vector<Var> xs;
  xs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor x = Tensor::matrix(batch.batch, width);
    // Padding appends zero channels, so channel c stays at column c in both models.
    for (std::size_t b = 0; b < batch.batch; ++b) {
      x.at(b, static_cast<std::size_t>(batch.input_id(b, t))) = 1.0;
    }
    xs.push_back(g.constant(std::move(x)));
  }
  return xs;
}

Var CopyModel::forward(Graph& g, const CopyBatch& batch) {
  const GateMaps maps = bind_cell(g);
  const BoundLinear out = head.bind(g);
  const auto xs = step_inputs(g, batch);
  const auto states = unroll(g, maps, xs, zero_state(g, batch.batch, hidden_width()));
  std::vector<Var> hs;
  hs.reserve(states.size());
  for (const auto& s : states) hs.push_back(s.h);
  return apply(g, out, ops::concat_rows(g, hs));
}

std::vector<int> step_major_targets(const CopyBatch& batch) {
  const std::size_t steps = batch.spec.steps();
  std::vector<int> out(batch.batch * steps);
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t b = 0; b < batch.batch; ++b) out[t * batch.batch + b] = batch.target(b, t);
  return out;
}

CopyMetrics metrics_from_logits(const CopyBatch& batch, const Tensor& logits, double loss) {
  const std::size_t steps = batch.spec.steps();
  const std::size_t K = logits.cols();
  std::vector<int> predictions(batch.batch * steps);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < batch.batch; ++b) {
      const double* row = &logits.raw()[(t * batch.batch + b) * K];
      predictions[b * steps + t] = static_cast<int>(std::max_element(row, row + K) - row);
    }
  }
  CopyMetrics m = score_predictions(batch, predictions);
  m.loss = loss;
  return m;
}

CopyMetrics evaluate(CopyModel& model, const CopyBatch& batch) {
  Graph g(false);
  const Var logits = model.forward(g, batch);
  const auto targets = step_major_targets(batch);
  const Var loss = ops::cross_entropy(g, logits, targets);
  return metrics_from_logits(batch, g.value(logits), g.value(loss)[0]);
}

}  // namespace qrnn
