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

#include <doctest.h>
#include <omp.h>

#include <vector>

#include "qrnn/kernels.hpp"
#include "qrnn/rng.hpp"

using namespace qrnn;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

struct ThreadScope {
  explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("parallel kernels are bitwise equal to the serial reference") {
  ThreadScope threads(4);
  Rng rng(99);
  // Includes sizes on both sides of the parallel threshold.
  const std::size_t sizes[][3] = {{1, 1, 1}, {3, 7, 5}, {10, 80, 80}, {64, 65, 63}, {200, 48, 40}};
  for (const auto& s : sizes) {
    const std::size_t R = s[0], K = s[1], C = s[2];
    CAPTURE(R);
    CAPTURE(K);
    CAPTURE(C);
    const auto a = random_vec(rng, R * K), bt = random_vec(rng, C * K), b = random_vec(rng, K * C);
    const auto at = random_vec(rng, K * R), init = random_vec(rng, R * C);

    std::vector<double> c1(R * C), c2(R * C);
    kernels::serial::gemm_nt(R, K, C, a, bt, c1);
    kernels::parallel::gemm_nt(R, K, C, a, bt, c2);
    CHECK(c1 == c2);

    c1 = init;
    c2 = init;
    kernels::serial::gemm_nn_acc(R, K, C, a, b, c1);
    kernels::parallel::gemm_nn_acc(R, K, C, a, b, c2);
    CHECK(c1 == c2);

    c1 = init;
    c2 = init;
    kernels::serial::gemm_tn_acc(R, K, C, at, b, c1);
    kernels::parallel::gemm_tn_acc(R, K, C, at, b, c2);
    CHECK(c1 == c2);

    const auto planes = random_vec(rng, 4 * R * C);
    std::vector<double> m1(16 * R * C), m2(16 * R * C);
    kernels::serial::assemble_quaternion(R, C, planes, m1);
    kernels::parallel::assemble_quaternion(R, C, planes, m2);
    CHECK(m1 == m2);

    auto g1 = random_vec(rng, 4 * R * C);
    auto g2 = g1;
    kernels::serial::assemble_quaternion_adjoint(R, C, m1, g1);
    kernels::parallel::assemble_quaternion_adjoint(R, C, m1, g2);
    CHECK(g1 == g2);
  }
}

TEST_CASE("gemm kernels against naive triple loops") {
  Rng rng(4);
  const std::size_t R = 6, K = 9, C = 5;
  const auto a = random_vec(rng, R * K), bt = random_vec(rng, C * K), b = random_vec(rng, K * C);
  const auto at = random_vec(rng, K * R);
  std::vector<double> c(R * C);
  kernels::gemm_nt(R, K, C, a, bt, c);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += a[i * K + k] * bt[j * K + k];
      CHECK(c[i * C + j] == doctest::Approx(s).epsilon(1e-14));
    }

  std::vector<double> nn(R * C, 1.0), tn(R * C, 1.0);
  kernels::gemm_nn_acc(R, K, C, a, b, nn);
  kernels::gemm_tn_acc(R, K, C, at, b, tn);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      double s1 = 1.0, s2 = 1.0;
      for (std::size_t k = 0; k < K; ++k) {
        s1 += a[i * K + k] * b[k * C + j];
        s2 += at[k * R + i] * b[k * C + j];
      }
      CHECK(nn[i * C + j] == doctest::Approx(s1).epsilon(1e-14));
      CHECK(tn[i * C + j] == doctest::Approx(s2).epsilon(1e-14));
    }
}

TEST_CASE("assemble adjoint satisfies <A(w), g> = <w, A*(g)>") {
  Rng rng(8);
  const std::size_t M = 3, N = 4;
  const auto w = random_vec(rng, 4 * M * N);
  const auto g = random_vec(rng, 16 * M * N);
  std::vector<double> aw(16 * M * N), ag(4 * M * N, 0.0);
  kernels::assemble_quaternion(M, N, w, aw);
  kernels::assemble_quaternion_adjoint(M, N, g, ag);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k < aw.size(); ++k) lhs += aw[k] * g[k];
  for (std::size_t k = 0; k < ag.size(); ++k) rhs += w[k] * ag[k];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}
