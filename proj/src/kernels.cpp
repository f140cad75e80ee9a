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

#include "qrnn/kernels.hpp"

#include <cstdint>

#include "qrnn/quaternion.hpp"

namespace qrnn::kernels {

namespace {
// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 15;

using Index = std::int64_t;
}  // namespace

namespace serial {

void gemm_nt(std::size_t rows, std::size_t inner, std::size_t cols, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      c[i * cols + j] = dot(&a[i * inner], &b[j * inner], inner);
}

void gemm_nn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* crow = &c[i * cols];
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a[i * inner + k];
      const double* brow = &b[k * cols];
      for (std::size_t j = 0; j < cols; ++j) crow[j] += aik * brow[j];
    }
  }
}

void gemm_tn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* crow = &c[i * cols];
    for (std::size_t k = 0; k < inner; ++k) {
      const double aki = a[k * rows + i];
      const double* brow = &b[k * cols];
      for (std::size_t j = 0; j < cols; ++j) crow[j] += aki * brow[j];
    }
  }
}

void assemble_quaternion(std::size_t m, std::size_t n, std::span<const double> blocks,
                         std::span<double> out) {
  const std::size_t plane = m * n;
  const std::size_t width = 4 * n;
  for (std::size_t co = 0; co < 4; ++co)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t ci = 0; ci < 4; ++ci) {
        const auto& e = qrnn::kHamiltonBlocks[co][ci];
        const double* src = &blocks[e.component * plane + i * n];
        double* dst = &out[(co * m + i) * width + ci * n];
        for (std::size_t j = 0; j < n; ++j) dst[j] = e.sign * src[j];
      }
}

void assemble_quaternion_adjoint(std::size_t m, std::size_t n, std::span<const double> grad_out,
                                 std::span<double> grad_blocks) {
  const std::size_t plane = m * n;
  const std::size_t width = 4 * n;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t co = 0; co < 4; ++co)
      for (std::size_t ci = 0; ci < 4; ++ci) {
        const auto& e = qrnn::kHamiltonBlocks[co][ci];
        const double* src = &grad_out[(co * m + i) * width + ci * n];
        double* dst = &grad_blocks[e.component * plane + i * n];
        for (std::size_t j = 0; j < n; ++j) dst[j] += e.sign * src[j];
      }
}

}  // namespace serial

namespace parallel {

void gemm_nt(std::size_t rows, std::size_t inner, std::size_t cols, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
#pragma omp parallel for schedule(static) if (rows * inner * cols >= kParallelThreshold)
  for (Index i = 0; i < static_cast<Index>(rows); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      c[i * cols + j] = dot(&a[i * inner], &b[j * inner], inner);
}

void gemm_nn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c) {
#pragma omp parallel for schedule(static) if (rows * inner * cols >= kParallelThreshold)
  for (Index i = 0; i < static_cast<Index>(rows); ++i) {
    double* crow = &c[i * cols];
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = a[i * inner + k];
      const double* brow = &b[k * cols];
      for (std::size_t j = 0; j < cols; ++j) crow[j] += aik * brow[j];
    }
  }
}

void gemm_tn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c) {
#pragma omp parallel for schedule(static) if (rows * inner * cols >= kParallelThreshold)
  for (Index i = 0; i < static_cast<Index>(rows); ++i) {
    double* crow = &c[i * cols];
    for (std::size_t k = 0; k < inner; ++k) {
      const double aki = a[k * rows + i];
      const double* brow = &b[k * cols];
      for (std::size_t j = 0; j < cols; ++j) crow[j] += aki * brow[j];
    }
  }
}

void assemble_quaternion(std::size_t m, std::size_t n, std::span<const double> blocks,
                         std::span<double> out) {
  const std::size_t plane = m * n;
  const std::size_t width = 4 * n;
#pragma omp parallel for collapse(2) schedule(static) if (16 * plane >= kParallelThreshold)
  for (Index co = 0; co < 4; ++co)
    for (Index i = 0; i < static_cast<Index>(m); ++i)
      for (std::size_t ci = 0; ci < 4; ++ci) {
        const auto& e = qrnn::kHamiltonBlocks[co][ci];
        const double* src = &blocks[e.component * plane + i * n];
        double* dst = &out[(co * m + i) * width + ci * n];
        for (std::size_t j = 0; j < n; ++j) dst[j] = e.sign * src[j];
      }
}

void assemble_quaternion_adjoint(std::size_t m, std::size_t n, std::span<const double> grad_out,
                                 std::span<double> grad_blocks) {
  const std::size_t plane = m * n;
  const std::size_t width = 4 * n;
  // Rows i are independent: each touches only row i of the four weight planes.
#pragma omp parallel for schedule(static) if (16 * plane >= kParallelThreshold)
  for (Index i = 0; i < static_cast<Index>(m); ++i)
    for (std::size_t co = 0; co < 4; ++co)
      for (std::size_t ci = 0; ci < 4; ++ci) {
        const auto& e = qrnn::kHamiltonBlocks[co][ci];
        const double* src = &grad_out[(co * m + i) * width + ci * n];
        double* dst = &grad_blocks[e.component * plane + i * n];
        for (std::size_t j = 0; j < n; ++j) dst[j] += e.sign * src[j];
      }
}

}  // namespace parallel

}  // namespace qrnn::kernels
