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

#include "qrnn/recurrent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrnn/errors.hpp"
#include "qrnn/rng.hpp"

namespace qrnn {

namespace {

template <typename Cell>
std::vector<Parameter*> cell_parameters(Cell& cell) {
  std::vector<Parameter*> out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.push_back(&cell.w[k].weight);
    out.push_back(&cell.r[k].weight);
    out.push_back(&cell.b[k]);
  }
  return out;
}

template <typename Cell>
std::vector<const Parameter*> cell_parameters(const Cell& cell) {
  std::vector<const Parameter*> out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.push_back(&cell.w[k].weight);
    out.push_back(&cell.r[k].weight);
    out.push_back(&cell.b[k]);
  }
  return out;
}

template <typename Cell>
GateMaps bind_cell(Graph& g, Cell& cell) {
  GateMaps maps;
  for (std::size_t k = 0; k < 4; ++k) {
    maps.input[k] = cell.w[k].bind(g);
    maps.recurrent[k] = cell.r[k].bind(g);
    maps.bias[k] = g.param(cell.b[k]);
  }
  return maps;
}

template <typename Cell>
void name_parameters(Cell& cell) {
  for (std::size_t k = 0; k < 4; ++k) {
    cell.w[k].weight.name = std::string("W_") + kGateNames[k];
    cell.r[k].weight.name = std::string("R_") + kGateNames[k];
    cell.b[k].name = std::string("b_") + kGateNames[k];
  }
}

void check_finite(std::span<const double> v, const char* what) {
  if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
    throw DivergenceError(std::string(what) + " became non-finite");
  }
}

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}

}  // namespace

// --- cells ---------------------------------------------------------------

QLSTMCell::QLSTMCell(std::size_t input_q, std::size_t hidden_q, std::uint64_t seed)
    : input_q_(input_q), hidden_q_(hidden_q) {
  for (std::size_t k = 0; k < 4; ++k) {
    w[k] = QuaternionLinear(input_q, hidden_q, false, derive_seed(seed, 2 * k));
    r[k] = QuaternionLinear(hidden_q, hidden_q, false, derive_seed(seed, 2 * k + 1));
    b[k] = Parameter("b", Tensor({4 * hidden_q}));
  }
  name_parameters(*this);
}

GateMaps QLSTMCell::bind(Graph& g) { return bind_cell(g, *this); }
std::vector<Parameter*> QLSTMCell::parameters() { return cell_parameters(*this); }
std::vector<const Parameter*> QLSTMCell::parameters() const { return cell_parameters(*this); }

std::size_t QLSTMCell::param_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

LSTMCell::LSTMCell(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  for (std::size_t k = 0; k < 4; ++k) {
    w[k] = RealLinear(input_dim, hidden_dim, false, derive_seed(seed, 2 * k));
    r[k] = RealLinear(hidden_dim, hidden_dim, false, derive_seed(seed, 2 * k + 1));
    b[k] = Parameter("b", Tensor({hidden_dim}));
  }
  name_parameters(*this);
}

GateMaps LSTMCell::bind(Graph& g) { return bind_cell(g, *this); }
std::vector<Parameter*> LSTMCell::parameters() { return cell_parameters(*this); }
std::vector<const Parameter*> LSTMCell::parameters() const { return cell_parameters(*this); }

std::size_t LSTMCell::param_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

// --- graph route ---------------------------------------------------------

GraphState zero_state(Graph& g, std::size_t batch, std::size_t hidden_width) {
  return {g.constant(Tensor::matrix(batch, hidden_width)),
          g.constant(Tensor::matrix(batch, hidden_width))};
}

GraphState graph_step(Graph& g, const GateMaps& maps, Var x, const GraphState& prev) {
  auto pre = [&](std::size_t k) {
    Var a = ops::add(g, apply(g, maps.input[k], x), apply(g, maps.recurrent[k], prev.h));
    return ops::add_row(g, a, maps.bias[k]);
  };
  Var f = ops::sigmoid(g, pre(kForget));
  Var i = ops::sigmoid(g, pre(kInput));
  Var cand = ops::tanh(g, pre(kCandidate));
  Var o = ops::sigmoid(g, pre(kOutput));
  Var c = ops::add(g, ops::mul(g, f, prev.c), ops::mul(g, i, cand));
  Var h = ops::mul(g, o, ops::tanh(g, c));
  return {h, c};
}

std::vector<GraphState> unroll(Graph& g, const GateMaps& maps, std::span<const Var> xs,
                               GraphState init) {
  std::vector<GraphState> states;
  states.reserve(xs.size());
  GraphState s = init;
  for (Var x : xs) {
    s = graph_step(g, maps, x, s);
    states.push_back(s);
  }
  return states;
}

std::vector<Var> bidirectional_unroll(Graph& g, const GateMaps& fwd, const GateMaps& bwd,
                                      std::span<const Var> xs, std::size_t hidden_width) {
  if (xs.empty()) return {};
  const std::size_t batch = g.value(xs[0]).rows();
  auto forward = unroll(g, fwd, xs, zero_state(g, batch, hidden_width));
  std::vector<Var> reversed(xs.rbegin(), xs.rend());
  auto backward = unroll(g, bwd, reversed, zero_state(g, batch, hidden_width));
  std::vector<Var> out(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    out[t] = ops::add(g, forward[t].h, backward[xs.size() - 1 - t].h);
  }
  return out;
}

// --- direct route --------------------------------------------------------

QLSTMState qlstm_step(const QLSTMCell& cell, const QuaternionVector& x, const QLSTMState& prev) {
  require_size(x.n_quats(), cell.input_q(), "qlstm_step input quaternions");
  require_size(prev.h.n_quats(), cell.hidden_q(), "qlstm_step hidden quaternions");
  require_size(prev.c.n_quats(), cell.hidden_q(), "qlstm_step cell quaternions");

  auto gate = [&](std::size_t k, Activation act) {
    QuaternionVector wx = qlinear_forward(cell.w[k], x);
    QuaternionVector rh = qlinear_forward(cell.r[k], prev.h);
    std::vector<double> pre(wx.raw());
    for (std::size_t j = 0; j < pre.size(); ++j) pre[j] += rh.raw()[j] + cell.b[k].value[j];
    return split_activation(QuaternionVector::from_components(std::move(pre)), act);
  };
  const QuaternionVector f = gate(kForget, Activation::sigmoid);
  const QuaternionVector i = gate(kInput, Activation::sigmoid);
  const QuaternionVector cand = gate(kCandidate, Activation::tanh);
  const QuaternionVector o = gate(kOutput, Activation::sigmoid);

  const std::size_t n = f.size();
  std::vector<double> c(n), h(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = f.raw()[j] * prev.c.raw()[j] + i.raw()[j] * cand.raw()[j];
    h[j] = o.raw()[j] * std::tanh(c[j]);
  }
  check_finite(c, "QLSTM cell state");
  check_finite(h, "QLSTM hidden state");
  return {QuaternionVector::from_components(std::move(h)),
          QuaternionVector::from_components(std::move(c))};
}

LSTMState lstm_step(const LSTMCell& cell, std::span<const double> x, const LSTMState& prev) {
  require_size(x.size(), cell.input_width(), "lstm_step input width");
  require_size(prev.h.size(), cell.hidden_width(), "lstm_step hidden width");
  require_size(prev.c.size(), cell.hidden_width(), "lstm_step cell width");

  auto gate = [&](std::size_t k, bool squash) {
    std::vector<double> a = cell.w[k].forward(x);
    const std::vector<double> rh = cell.r[k].forward(prev.h);
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double v = a[j] + rh[j] + cell.b[k].value[j];
      a[j] = squash ? sigmoid(v) : std::tanh(v);
    }
    return a;
  };
  const auto f = gate(kForget, true);
  const auto i = gate(kInput, true);
  const auto cand = gate(kCandidate, false);
  const auto o = gate(kOutput, true);

  LSTMState next = LSTMState::zeros(cell.hidden_width());
  for (std::size_t j = 0; j < next.h.size(); ++j) {
    next.c[j] = f[j] * prev.c[j] + i[j] * cand[j];
    next.h[j] = o[j] * std::tanh(next.c[j]);
  }
  check_finite(next.c, "LSTM cell state");
  check_finite(next.h, "LSTM hidden state");
  return next;
}

std::vector<QLSTMState> run_sequence(const QLSTMCell& cell, std::span<const QuaternionVector> xs,
                                     QLSTMState init) {
  std::vector<QLSTMState> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    init = qlstm_step(cell, x, init);
    out.push_back(init);
  }
  return out;
}

std::vector<LSTMState> run_sequence(const LSTMCell& cell,
                                    std::span<const std::vector<double>> xs, LSTMState init) {
  std::vector<LSTMState> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    init = lstm_step(cell, x, init);
    out.push_back(init);
  }
  return out;
}

std::vector<QuaternionVector> bidirectional_run(const QLSTMCell& fwd, const QLSTMCell& bwd,
                                                std::span<const QuaternionVector> xs) {
  require_size(bwd.hidden_q(), fwd.hidden_q(), "bidirectional hidden quaternions");
  const auto ahead = run_sequence(fwd, xs, QLSTMState::zeros(fwd.hidden_q()));
  std::vector<QuaternionVector> reversed(xs.rbegin(), xs.rend());
  const auto behind = run_sequence(bwd, reversed, QLSTMState::zeros(bwd.hidden_q()));
  std::vector<QuaternionVector> out;
  out.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    std::vector<double> sum(ahead[t].h.raw());
    const auto& other = behind[xs.size() - 1 - t].h.raw();
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += other[j];
    out.push_back(QuaternionVector::from_components(std::move(sum)));
  }
  return out;
}

std::vector<std::vector<double>> bidirectional_run(const LSTMCell& fwd, const LSTMCell& bwd,
                                                   std::span<const std::vector<double>> xs) {
  require_size(bwd.hidden_width(), fwd.hidden_width(), "bidirectional hidden width");
  const auto ahead = run_sequence(fwd, xs, LSTMState::zeros(fwd.hidden_width()));
  std::vector<std::vector<double>> reversed(xs.rbegin(), xs.rend());
  const auto behind = run_sequence(bwd, reversed, LSTMState::zeros(bwd.hidden_width()));
  std::vector<std::vector<double>> out;
  out.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    std::vector<double> sum(ahead[t].h);
    const auto& other = behind[xs.size() - 1 - t].h;
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += other[j];
    out.push_back(std::move(sum));
  }
  return out;
}

}  // namespace qrnn
