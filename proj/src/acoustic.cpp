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

#include "qrnn/acoustic.hpp"

#include <cstdint>
#include <string>

#include "qrnn/errors.hpp"

namespace qrnn::acoustic {

namespace {

double denominator(std::size_t window) {
  double s = 0.0;
  for (std::size_t n = 1; n <= window; ++n) s += static_cast<double>(n * n);
  return 2.0 * s;
}

// Delta of frame t for all bands, written to out row t.
inline void delta_row(const Tensor& e, std::size_t window, double denom, std::size_t t,
                      Tensor& out) {
  const std::size_t T = e.rows(), F = e.cols();
  const auto last = static_cast<std::int64_t>(T) - 1;
  for (std::size_t f = 0; f < F; ++f) {
    double acc = 0.0;
    for (std::size_t n = 1; n <= window; ++n) {
      const auto ahead = std::min<std::int64_t>(static_cast<std::int64_t>(t + n), last);
      const auto behind = std::max<std::int64_t>(static_cast<std::int64_t>(t) -
                                                     static_cast<std::int64_t>(n),
                                                 0);
      acc += static_cast<double>(n) * (e.at(static_cast<std::size_t>(ahead), f) -
                                       e.at(static_cast<std::size_t>(behind), f));
    }
    out.at(t, f) = acc / denom;
  }
}

void check_window(std::size_t window) {
  if (window < 1) throw InputError("delta window must be at least 1");
}

}  // namespace

void validate_energies(const Tensor& energies) {
  if (energies.rank() != 2 || energies.rows() < 1 || energies.cols() < 1) {
    throw ShapeError("energy matrix must be [frames x bands] with both extents >= 1, got " +
                     shape_string(energies.shape()));
  }
  if (!energies.all_finite()) throw InputError("energy matrix contains non-finite values");
}

namespace serial {
Tensor compute_delta(const Tensor& energies, std::size_t window) {
  validate_energies(energies);
  check_window(window);
  Tensor out(energies.shape());
  const double denom = denominator(window);
  for (std::size_t t = 0; t < energies.rows(); ++t) delta_row(energies, window, denom, t, out);
  return out;
}
}  // namespace serial

Tensor compute_delta(const Tensor& energies, std::size_t window) {
  validate_energies(energies);
  check_window(window);
  Tensor out(energies.shape());
  const double denom = denominator(window);
  const auto frames = static_cast<std::int64_t>(energies.rows());
#pragma omp parallel for schedule(static) if (energies.size() * window >= 4096)
  for (std::int64_t t = 0; t < frames; ++t) {
    delta_row(energies, window, denom, static_cast<std::size_t>(t), out);
  }
  return out;
}

Tensor pack_features_matrix(const Tensor& energies, std::size_t window) {
  const Tensor d1 = compute_delta(energies, window);
  const Tensor d2 = compute_delta(d1, window);
  const Tensor d3 = compute_delta(d2, window);
  const std::size_t T = energies.rows(), F = energies.cols();
  Tensor out = Tensor::matrix(T, 4 * F);
  const Tensor* views[] = {&energies, &d1, &d2, &d3};
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t f = 0; f < F; ++f) out.at(t, c * F + f) = views[c]->at(t, f);
  return out;
}

std::vector<QuaternionVector> pack_features(const Tensor& energies, std::size_t window) {
  const Tensor packed = pack_features_matrix(energies, window);
  std::vector<QuaternionVector> frames;
  frames.reserve(packed.rows());
  const std::size_t width = packed.cols();
  for (std::size_t t = 0; t < packed.rows(); ++t) {
    const auto first = packed.raw().begin() + static_cast<std::ptrdiff_t>(t * width);
    frames.push_back(QuaternionVector::from_components({first, first + static_cast<std::ptrdiff_t>(width)}));
  }
  return frames;
}

}  // namespace qrnn::acoustic
