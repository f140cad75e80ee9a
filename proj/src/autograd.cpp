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

#include "qrnn/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrnn/errors.hpp"
#include "qrnn/kernels.hpp"

namespace qrnn {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Var Graph::constant(Tensor value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = record_grad_ && requires_grad;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Graph::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = record_grad_;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::span<const Var> inputs, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  if (record_grad_) {
    n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                  [this](Var v) { return nodes_[v.id].requires_grad; });
    if (n.requires_grad) n.backprop = std::move(backprop);
  }
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Tensor& Graph::grad_buffer(Var v) { return nodes_[v.id].grad; }

const Tensor& Graph::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (!backward_done_ || !n.requires_grad) {
    throw StateError("no gradient recorded for this node");
  }
  return n.grad;
}

void Graph::backward(Var loss, double seed) {
  if (!loss.valid() || loss.id >= nodes_.size()) {
    throw StateError("backward called before a forward pass was recorded");
  }
  if (backward_done_) throw StateError("backward already ran on this graph");
  if (nodes_[loss.id].value.size() != 1) {
    throw ShapeError("backward target must be a scalar, got shape " +
                     shape_string(nodes_[loss.id].value.shape()));
  }
  backward_done_ = true;
  if (!nodes_[loss.id].requires_grad) return;

  for (std::size_t i = 0; i <= loss.id; ++i) {
    if (nodes_[i].requires_grad) nodes_[i].grad = Tensor(nodes_[i].value.shape());
  }
  nodes_[loss.id].grad[0] = seed;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    if (n.backprop) {
      n.backprop(*this, n.grad);
    } else if (n.param != nullptr) {
      auto& dst = n.param->grad.raw();
      const auto& src = n.grad.raw();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
      n.param->has_grad = true;
    }
  }
}

namespace ops {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

void accumulate(Tensor& dst, const Tensor& src) {
  auto& d = dst.raw();
  const auto& s = src.raw();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k];
}

}  // namespace

Var matmul_nt(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require(A.rank() == 2 && B.rank() == 2 && A.cols() == B.cols(),
          "matmul_nt: cannot multiply " + shape_string(A.shape()) + " by transpose of " +
              shape_string(B.shape()));
  const std::size_t R = A.rows(), K = A.cols(), C = B.rows();
  Tensor out = Tensor::matrix(R, C);
  kernels::gemm_nt(R, K, C, A.data(), B.data(), out.data());
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs, [a, b, R, K, C](Graph& g, const Tensor& dy) {
    if (g.requires_grad(a)) {
      kernels::gemm_nn_acc(R, C, K, dy.data(), g.value(b).data(), g.grad_buffer(a).data());
    }
    if (g.requires_grad(b)) {
      kernels::gemm_tn_acc(C, R, K, dy.data(), g.value(a).data(), g.grad_buffer(b).data());
    }
  });
}

Var add(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require(A.same_shape(B), "add: shape mismatch " + shape_string(A.shape()) + " vs " +
                               shape_string(B.shape()));
  Tensor out = A;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += B[k];
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs, [a, b](Graph& g, const Tensor& dy) {
    if (g.requires_grad(a)) accumulate(g.grad_buffer(a), dy);
    if (g.requires_grad(b)) accumulate(g.grad_buffer(b), dy);
  });
}

Var add_row(Graph& g, Var a, Var bias) {
  const Tensor& A = g.value(a);
  const Tensor& b = g.value(bias);
  require(A.rank() == 2 && b.size() == A.cols(),
          "add_row: bias " + shape_string(b.shape()) + " does not fit " + shape_string(A.shape()));
  Tensor out = A;
  const std::size_t R = A.rows(), C = A.cols();
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) out[r * C + c] += b[c];
  const Var inputs[] = {a, bias};
  return g.record(std::move(out), inputs, [a, bias, R, C](Graph& g, const Tensor& dy) {
    if (g.requires_grad(a)) accumulate(g.grad_buffer(a), dy);
    if (g.requires_grad(bias)) {
      Tensor& db = g.grad_buffer(bias);
      for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) db[c] += dy[r * C + c];
    }
  });
}

Var mul(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require(A.same_shape(B), "mul: shape mismatch " + shape_string(A.shape()) + " vs " +
                               shape_string(B.shape()));
  Tensor out = A;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= B[k];
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs, [a, b](Graph& g, const Tensor& dy) {
    if (g.requires_grad(a)) {
      Tensor& da = g.grad_buffer(a);
      const Tensor& B = g.value(b);
      for (std::size_t k = 0; k < da.size(); ++k) da[k] += dy[k] * B[k];
    }
    if (g.requires_grad(b)) {
      Tensor& db = g.grad_buffer(b);
      const Tensor& A = g.value(a);
      for (std::size_t k = 0; k < db.size(); ++k) db[k] += dy[k] * A[k];
    }
  });
}

Var sigmoid(Graph& g, Var a) {
  Tensor out = g.value(a);
  for (double& v : out.raw()) v = qrnn::sigmoid(v);
  const Var inputs[] = {a};
  const Var self{g.size()};
  return g.record(std::move(out), inputs, [a, self](Graph& g, const Tensor& dy) {
    Tensor& da = g.grad_buffer(a);
    const Tensor& y = g.value(self);
    for (std::size_t k = 0; k < da.size(); ++k) da[k] += dy[k] * y[k] * (1.0 - y[k]);
  });
}

Var tanh(Graph& g, Var a) {
  Tensor out = g.value(a);
  for (double& v : out.raw()) v = std::tanh(v);
  const Var inputs[] = {a};
  const Var self{g.size()};
  return g.record(std::move(out), inputs, [a, self](Graph& g, const Tensor& dy) {
    Tensor& da = g.grad_buffer(a);
    const Tensor& y = g.value(self);
    for (std::size_t k = 0; k < da.size(); ++k) da[k] += dy[k] * (1.0 - y[k] * y[k]);
  });
}

Var sum(Graph& g, Var a) {
  double s = 0.0;
  for (double v : g.value(a).raw()) s += v;
  const Var inputs[] = {a};
  return g.record(Tensor({1}, std::vector<double>{s}), inputs, [a](Graph& g, const Tensor& dy) {
    for (double& v : g.grad_buffer(a).raw()) v += dy[0];
  });
}

Var concat_rows(Graph& g, std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows: nothing to concatenate");
  const std::size_t C = g.value(parts[0]).cols();
  std::size_t R = 0;
  for (Var p : parts) {
    const Tensor& t = g.value(p);
    require(t.rank() == 2 && t.cols() == C, "concat_rows: width mismatch");
    R += t.rows();
  }
  Tensor out = Tensor::matrix(R, C);
  std::size_t offset = 0;
  for (Var p : parts) {
    const auto& src = g.value(p).raw();
    std::copy(src.begin(), src.end(), out.raw().begin() + static_cast<std::ptrdiff_t>(offset));
    offset += src.size();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return g.record(std::move(out), inputs, [inputs](Graph& g, const Tensor& dy) {
    std::size_t offset = 0;
    for (Var p : inputs) {
      const std::size_t n = g.value(p).size();
      if (g.requires_grad(p)) {
        auto& d = g.grad_buffer(p).raw();
        for (std::size_t k = 0; k < n; ++k) d[k] += dy[offset + k];
      }
      offset += n;
    }
  });
}

Var assemble_quaternion(Graph& g, Var blocks) {
  const Tensor& W = g.value(blocks);
  require(W.rank() == 3 && W.shape()[0] == 4,
          "assemble_quaternion: expected [4 x M x N] planes, got " + shape_string(W.shape()));
  const std::size_t M = W.shape()[1], N = W.shape()[2];
  Tensor out = Tensor::matrix(4 * M, 4 * N);
  kernels::assemble_quaternion(M, N, W.data(), out.data());
  const Var inputs[] = {blocks};
  return g.record(std::move(out), inputs, [blocks, M, N](Graph& g, const Tensor& dy) {
    kernels::assemble_quaternion_adjoint(M, N, dy.data(), g.grad_buffer(blocks).data());
  });
}

Var cross_entropy(Graph& g, Var logits, std::span<const int> targets) {
  const Tensor& Z = g.value(logits);
  require(Z.rank() == 2 && Z.rows() == targets.size(),
          "cross_entropy: " + std::to_string(targets.size()) + " targets for logits " +
              shape_string(Z.shape()));
  const std::size_t R = Z.rows(), K = Z.cols();
  Tensor probs = Tensor::matrix(R, K);
  double total = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    const int t = targets[r];
    if (t < 0 || static_cast<std::size_t>(t) >= K) {
      throw InputError("cross_entropy: target " + std::to_string(t) + " outside [0, " +
                       std::to_string(K) + ")");
    }
    const double* z = &Z.raw()[r * K];
    const double zmax = *std::max_element(z, z + K);
    double denom = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      probs[r * K + k] = std::exp(z[k] - zmax);
      denom += probs[r * K + k];
    }
    for (std::size_t k = 0; k < K; ++k) probs[r * K + k] /= denom;
    total += std::log(denom) - (z[t] - zmax);
  }
  const double scale = 1.0 / static_cast<double>(R);
  std::vector<int> tg(targets.begin(), targets.end());
  const Var inputs[] = {logits};
  return g.record(Tensor({1}, std::vector<double>{total * scale}), inputs,
                  [logits, probs = std::move(probs), tg = std::move(tg), R, K, scale](
                      Graph& g, const Tensor& dy) {
                    Tensor& dz = g.grad_buffer(logits);
                    const double s = dy[0] * scale;
                    for (std::size_t r = 0; r < R; ++r) {
                      for (std::size_t k = 0; k < K; ++k) dz[r * K + k] += s * probs[r * K + k];
                      dz[r * K + static_cast<std::size_t>(tg[r])] -= s;
                    }
                  });
}

}  // namespace ops

}  // namespace qrnn
