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

#include "qrnn/layers.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qrnn/errors.hpp"
#include "qrnn/kernels.hpp"
#include "qrnn/rng.hpp"

namespace qrnn {

double InitConfig::sigma() const {
  return 1.0 / std::sqrt(2.0 * static_cast<double>(fan_in + fan_out));
}

Tensor quaternion_init(const InitConfig& cfg, std::size_t m, std::size_t n) {
  Tensor w({4, m, n});
  Rng rng{lo32(cfg.seed), hi32(cfg.seed)};
  const double sigma = cfg.sigma();
  const std::size_t plane = m * n;
  for (std::size_t k = 0; k < plane; ++k) {
    const double phi = rng.uniform(-sigma, sigma);
    const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    // Uniform direction on the unit sphere (Archimedes' projection).
    const double uz = rng.uniform(-1.0, 1.0);
    const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double rho = std::sqrt(1.0 - uz * uz);
    const double s = phi * std::sin(theta);
    w[k] = phi * std::cos(theta);
    w[plane + k] = s * rho * std::cos(azimuth);
    w[2 * plane + k] = s * rho * std::sin(azimuth);
    w[3 * plane + k] = s * uz;
  }
  return w;
}

Tensor glorot_uniform(std::size_t in, std::size_t out, std::uint64_t seed) {
  Tensor w = Tensor::matrix(out, in);
  Rng rng{lo32(seed), hi32(seed)};
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (double& v : w.raw()) v = rng.uniform(-limit, limit);
  return w;
}

Var apply(Graph& g, const BoundLinear& layer, Var x) {
  Var y = ops::matmul_nt(g, x, layer.matrix);
  return layer.bias.valid() ? ops::add_row(g, y, layer.bias) : y;
}

// --- RealLinear ----------------------------------------------------------

RealLinear::RealLinear(std::size_t in_dim, std::size_t out_dim, bool with_bias,
                       std::uint64_t seed)
    : weight("weight", glorot_uniform(in_dim, out_dim, seed)),
      in_dim_(in_dim),
      out_dim_(out_dim) {
  if (with_bias) bias.emplace("bias", Tensor({out_dim}));
}

BoundLinear RealLinear::bind(Graph& g) {
  BoundLinear b;
  b.matrix = g.param(weight);
  if (bias) b.bias = g.param(*bias);
  return b;
}

std::vector<Parameter*> RealLinear::parameters() {
  std::vector<Parameter*> out{&weight};
  if (bias) out.push_back(&*bias);
  return out;
}

std::vector<const Parameter*> RealLinear::parameters() const {
  std::vector<const Parameter*> out{&weight};
  if (bias) out.push_back(&*bias);
  return out;
}

std::size_t RealLinear::param_count() const {
  return in_dim_ * out_dim_ + (bias ? out_dim_ : 0);
}

std::vector<double> RealLinear::forward(std::span<const double> x) const {
  if (x.size() != in_dim_) {
    throw ShapeError("RealLinear: expected " + std::to_string(in_dim_) + " inputs, got " +
                     std::to_string(x.size()));
  }
  std::vector<double> y(out_dim_);
  kernels::gemm_nt(1, in_dim_, out_dim_, x, weight.value.data(), y);
  if (bias) {
    for (std::size_t o = 0; o < out_dim_; ++o) y[o] += bias->value[o];
  }
  return y;
}

// --- QuaternionLinear ----------------------------------------------------

QuaternionLinear::QuaternionLinear(std::size_t in_q, std::size_t out_q, bool with_bias,
                                   std::uint64_t seed)
    : weight("weight", quaternion_init(InitConfig{in_q, out_q, seed}, out_q, in_q)),
      in_q_(in_q),
      out_q_(out_q) {
  if (with_bias) bias.emplace("bias", Tensor({4 * out_q}));
}

Quaternion QuaternionLinear::weight_at(std::size_t m, std::size_t n) const {
  const std::size_t plane = out_q_ * in_q_;
  const std::size_t k = m * in_q_ + n;
  const auto& w = weight.value;
  return {w[k], w[plane + k], w[2 * plane + k], w[3 * plane + k]};
}

void QuaternionLinear::set_weight(std::size_t m, std::size_t n, const Quaternion& q) {
  const std::size_t plane = out_q_ * in_q_;
  const std::size_t k = m * in_q_ + n;
  auto& w = weight.value;
  w[k] = q.r;
  w[plane + k] = q.x;
  w[2 * plane + k] = q.y;
  w[3 * plane + k] = q.z;
}

BoundLinear QuaternionLinear::bind(Graph& g) {
  BoundLinear b;
  b.matrix = ops::assemble_quaternion(g, g.param(weight));
  if (bias) b.bias = g.param(*bias);
  return b;
}

std::vector<Parameter*> QuaternionLinear::parameters() {
  std::vector<Parameter*> out{&weight};
  if (bias) out.push_back(&*bias);
  return out;
}

std::vector<const Parameter*> QuaternionLinear::parameters() const {
  std::vector<const Parameter*> out{&weight};
  if (bias) out.push_back(&*bias);
  return out;
}

std::size_t QuaternionLinear::param_count() const {
  return 4 * out_q_ * in_q_ + (bias ? 4 * out_q_ : 0);
}

QuaternionVector qlinear_forward(const QuaternionLinear& layer, const QuaternionVector& x) {
  if (x.n_quats() != layer.in_q()) {
    throw ShapeError("QuaternionLinear: expected " + std::to_string(layer.in_q()) +
                     " input quaternions, got " + std::to_string(x.n_quats()));
  }
  QuaternionVector y(layer.out_q());
  for (std::size_t m = 0; m < layer.out_q(); ++m) {
    Quaternion acc{};
    if (layer.bias) {
      const auto& b = layer.bias->value;
      const std::size_t M = layer.out_q();
      acc = {b[m], b[M + m], b[2 * M + m], b[3 * M + m]};
    }
    for (std::size_t n = 0; n < layer.in_q(); ++n) {
      acc = acc + hamilton_product(layer.weight_at(m, n), x.get(n));
    }
    y.set(m, acc);
  }
  return y;
}

Tensor assemble_real_matrix(const QuaternionLinear& layer) {
  Tensor out = Tensor::matrix(4 * layer.out_q(), 4 * layer.in_q());
  kernels::assemble_quaternion(layer.out_q(), layer.in_q(), layer.weight.value.data(),
                               out.data());
  return out;
}

QuaternionVector split_activation(const QuaternionVector& v, Activation kind) {
  std::vector<double> out(v.raw());
  for (double& c : out) c = kind == Activation::sigmoid ? sigmoid(c) : std::tanh(c);
  return QuaternionVector::from_components(std::move(out));
}

}  // namespace qrnn
