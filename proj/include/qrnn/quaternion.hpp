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
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace qrnn {

// r + x i + y j + z k
struct Quaternion {
  double r = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

using Mat4 = std::array<std::array<double, 4>, 4>;

constexpr Quaternion hamilton_product(const Quaternion& a, const Quaternion& b) {
  return {a.r * b.r - a.x * b.x - a.y * b.y - a.z * b.z,
          a.r * b.x + a.x * b.r + a.y * b.z - a.z * b.y,
          a.r * b.y - a.x * b.z + a.y * b.r + a.z * b.x,
          a.r * b.z + a.x * b.y - a.y * b.x + a.z * b.r};
}

constexpr Quaternion conjugate(const Quaternion& q) { return {q.r, -q.x, -q.y, -q.z}; }

inline double norm(const Quaternion& q) {
  return std::sqrt(q.r * q.r + q.x * q.x + q.y * q.y + q.z * q.z);
}

constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.r + b.r, a.x + b.x, a.y + b.y, a.z + b.z};
}

constexpr Quaternion operator-(const Quaternion& q) { return {-q.r, -q.x, -q.y, -q.z}; }

// Matrix of q ⊗ (·) acting on (r, x, y, z) column vectors.
constexpr Mat4 left_mul_matrix(const Quaternion& q) {
  return {{{q.r, -q.x, -q.y, -q.z},
           {q.x, q.r, -q.z, q.y},
           {q.y, q.z, q.r, -q.x},
           {q.z, -q.y, q.x, q.r}}};
}

// Sign and source component of each 4x4 block of left_mul_matrix, indexed
// [output component][input component]. Shared by the structured real-matrix
// assembly and its adjoint.
struct BlockEntry {
  int component;  // 0=r 1=x 2=y 3=z
  double sign;
};
inline constexpr std::array<std::array<BlockEntry, 4>, 4> kHamiltonBlocks = {{
    {{{0, +1.0}, {1, -1.0}, {2, -1.0}, {3, -1.0}}},
    {{{1, +1.0}, {0, +1.0}, {3, -1.0}, {2, +1.0}}},
    {{{2, +1.0}, {3, +1.0}, {0, +1.0}, {1, -1.0}}},
    {{{3, +1.0}, {2, -1.0}, {1, +1.0}, {0, +1.0}}},
}};

// N quaternions stored as [r_0..r_{N-1} | x_0.. | y_0.. | z_0..].
class QuaternionVector {
 public:
  QuaternionVector() = default;
  explicit QuaternionVector(std::size_t n_quats) : components_(4 * n_quats, 0.0) {}

  // Throws ShapeError unless components.size() is a multiple of 4.
  static QuaternionVector from_components(std::vector<double> components);

  std::size_t n_quats() const { return components_.size() / 4; }
  std::size_t size() const { return components_.size(); }

  std::span<double> components() { return components_; }
  std::span<const double> components() const { return components_; }
  const std::vector<double>& raw() const { return components_; }

  Quaternion get(std::size_t n) const;
  void set(std::size_t n, const Quaternion& q);

  friend bool operator==(const QuaternionVector&, const QuaternionVector&) = default;

 private:
  std::vector<double> components_;
};

QuaternionVector pack_split(std::span<const Quaternion> quats);
std::vector<Quaternion> unpack_split(const QuaternionVector& v);
// Checks the length before reinterpreting raw reals as split layout.
std::vector<Quaternion> unpack_split(std::span<const double> components);

}  // namespace qrnn
