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
#include <optional>
#include <vector>

#include "qrnn/autograd.hpp"
#include "qrnn/quaternion.hpp"
#include "qrnn/tensor.hpp"

namespace qrnn {

// Polar quaternion initialisation scale. Fans are counted in quaternions.
struct InitConfig {
  std::size_t fan_in = 1;
  std::size_t fan_out = 1;
  std::uint64_t seed = 0;

  double sigma() const;
};

// Weight planes [4 x m x n]: w = phi (cos theta + u sin theta) with
// phi ~ U[-sigma, sigma], theta ~ U[-pi, pi], u a uniform unit pure quaternion.
Tensor quaternion_init(const InitConfig& cfg, std::size_t m, std::size_t n);

// [out x in] uniform on +-sqrt(6 / (in + out)).
Tensor glorot_uniform(std::size_t in, std::size_t out, std::uint64_t seed);

// A linear map lowered onto a Graph: y = x * matrix^T (+ bias).
struct BoundLinear {
  Var matrix;
  Var bias;  // invalid when the layer has none
};

Var apply(Graph& g, const BoundLinear& layer, Var x);

class RealLinear {
 public:
  RealLinear() = default;
  RealLinear(std::size_t in_dim, std::size_t out_dim, bool with_bias, std::uint64_t seed);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }

  Parameter weight;               // [out x in]
  std::optional<Parameter> bias;  // [out]

  BoundLinear bind(Graph& g);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t param_count() const;

  // Plain evaluation of one input vector.
  std::vector<double> forward(std::span<const double> x) const;

 private:
  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
};

class QuaternionLinear {
 public:
  QuaternionLinear() = default;
  QuaternionLinear(std::size_t in_q, std::size_t out_q, bool with_bias, std::uint64_t seed);

  std::size_t in_q() const { return in_q_; }
  std::size_t out_q() const { return out_q_; }

  Parameter weight;               // [4 x out_q x in_q] planes r, x, y, z
  std::optional<Parameter> bias;  // [4 out_q], split layout

  Quaternion weight_at(std::size_t m, std::size_t n) const;
  void set_weight(std::size_t m, std::size_t n, const Quaternion& q);

  // Assembles the structured real matrix once per graph.
  BoundLinear bind(Graph& g);
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t param_count() const;

 private:
  std::size_t in_q_ = 0;
  std::size_t out_q_ = 0;
};

// out[m] = sum_n W[m, n] ⊗ x[n] (+ bias[m]), evaluated with Hamilton products.
// Throws ShapeError if x.n_quats() != layer.in_q().
QuaternionVector qlinear_forward(const QuaternionLinear& layer, const QuaternionVector& x);

// The [4M x 4N] real matrix equivalent of the layer's weights in split layout.
Tensor assemble_real_matrix(const QuaternionLinear& layer);

enum class Activation { sigmoid, tanh };

QuaternionVector split_activation(const QuaternionVector& v, Activation kind);

}  // namespace qrnn
