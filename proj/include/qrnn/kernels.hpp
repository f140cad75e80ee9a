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
#include <span>

// Dense kernels behind the autodiff ops. Every kernel exists twice: a plain
// serial loop nest kept as the reference, and an OpenMP version that splits
// the output rows across threads. Both accumulate each output element in the
// same order, so their results are bitwise identical for any thread count.
namespace qrnn::kernels {

namespace serial {
// c[rows x cols] = a[rows x inner] * b[cols x inner]^T
void gemm_nt(std::size_t rows, std::size_t inner, std::size_t cols, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
// c[rows x cols] += a[rows x inner] * b[inner x cols]
void gemm_nn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c);
// c[rows x cols] += a[inner x rows]^T * b[inner x cols]
void gemm_tn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c);
// blocks[4 x m x n] (r, x, y, z weight planes) -> out[4m x 4n] in split layout.
void assemble_quaternion(std::size_t m, std::size_t n, std::span<const double> blocks,
                         std::span<double> out);
// Adjoint of assemble_quaternion: grad_blocks += A^T(grad_out).
void assemble_quaternion_adjoint(std::size_t m, std::size_t n, std::span<const double> grad_out,
                                 std::span<double> grad_blocks);
}  // namespace serial

namespace parallel {
void gemm_nt(std::size_t rows, std::size_t inner, std::size_t cols, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c);
void gemm_tn_acc(std::size_t rows, std::size_t inner, std::size_t cols,
                 std::span<const double> a, std::span<const double> b, std::span<double> c);
void assemble_quaternion(std::size_t m, std::size_t n, std::span<const double> blocks,
                         std::span<double> out);
void assemble_quaternion_adjoint(std::size_t m, std::size_t n, std::span<const double> grad_out,
                                 std::span<double> grad_blocks);
}  // namespace parallel

using parallel::assemble_quaternion;
using parallel::assemble_quaternion_adjoint;
using parallel::gemm_nn_acc;
using parallel::gemm_nt;
using parallel::gemm_tn_acc;

// Fixed-order dot product shared by both gemm_nt variants.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace qrnn::kernels
