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
#include <vector>

#include "qrnn/quaternion.hpp"
#include "qrnn/tensor.hpp"

// Acoustic quaternions: for every band f of frame t the quaternion
// (e, de/dt, d2e/dt2, d3e/dt3), derivatives taken with a regression window.
namespace qrnn::acoustic {

// Checks a [frames x bands] matrix of finite log energies, both extents >= 1.
void validate_energies(const Tensor& energies);

// d_t = sum_{n=1..N} n (e_{t+n} - e_{t-n}) / (2 sum_{n=1..N} n^2), frames
// outside [0, T) replaced by the nearest edge frame. Same shape as the input.
Tensor compute_delta(const Tensor& energies, std::size_t window = 2);

namespace serial {
Tensor compute_delta(const Tensor& energies, std::size_t window = 2);
}

// One split-layout QuaternionVector of F quaternions per frame.
std::vector<QuaternionVector> pack_features(const Tensor& energies, std::size_t window = 2);

// Same data as a [frames x 4F] matrix, each row a split-layout frame
// [e | delta | delta2 | delta3].
Tensor pack_features_matrix(const Tensor& energies, std::size_t window = 2);

}  // namespace qrnn::acoustic
