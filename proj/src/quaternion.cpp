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

#include "qrnn/quaternion.hpp"

#include <string>

#include "qrnn/errors.hpp"

namespace qrnn {

QuaternionVector QuaternionVector::from_components(std::vector<double> components) {
  if (components.size() % 4 != 0) {
    throw ShapeError("quaternion vector length " + std::to_string(components.size()) +
                     " is not a multiple of 4");
  }
  QuaternionVector v;
  v.components_ = std::move(components);
  return v;
}

Quaternion QuaternionVector::get(std::size_t n) const {
  const std::size_t N = n_quats();
  return {components_[n], components_[N + n], components_[2 * N + n], components_[3 * N + n]};
}

void QuaternionVector::set(std::size_t n, const Quaternion& q) {
  const std::size_t N = n_quats();
  components_[n] = q.r;
  components_[N + n] = q.x;
  components_[2 * N + n] = q.y;
  components_[3 * N + n] = q.z;
}

QuaternionVector pack_split(std::span<const Quaternion> quats) {
  QuaternionVector v(quats.size());
  for (std::size_t n = 0; n < quats.size(); ++n) v.set(n, quats[n]);
  return v;
}

std::vector<Quaternion> unpack_split(const QuaternionVector& v) {
  std::vector<Quaternion> out(v.n_quats());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = v.get(n);
  return out;
}

std::vector<Quaternion> unpack_split(std::span<const double> components) {
  return unpack_split(
      QuaternionVector::from_components({components.begin(), components.end()}));
}

}  // namespace qrnn
