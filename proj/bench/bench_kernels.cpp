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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "qrnn/acoustic.hpp"
#include "qrnn/kernels.hpp"
#include "qrnn/rng.hpp"

namespace {

using qrnn::Rng;
namespace kernels = qrnn::kernels;

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <auto Kernel>
void BM_GemmNT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vec(n * n, 1), b = random_vec(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(n, n, n, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <auto Kernel>
void BM_GemmNNAcc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vec(n * n, 1), b = random_vec(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(n, n, n, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <auto Kernel>
void BM_Assemble(benchmark::State& state) {
  const auto q = static_cast<std::size_t>(state.range(0));
  const auto blocks = random_vec(4 * q * q, 3);
  std::vector<double> out(16 * q * q);
  for (auto _ : state) {
    Kernel(q, q, blocks, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(out.size() * sizeof(double)));
}

template <bool Parallel>
void BM_Delta(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  qrnn::Tensor e({frames, 40}, random_vec(frames * 40, 4));
  for (auto _ : state) {
    qrnn::Tensor d = Parallel ? qrnn::acoustic::compute_delta(e) : qrnn::acoustic::serial::compute_delta(e);
    benchmark::DoNotOptimize(d.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames * 40));
}

}  // namespace

BENCHMARK(BM_GemmNT<kernels::serial::gemm_nt>)->Name("gemm_nt/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_GemmNT<kernels::parallel::gemm_nt>)->Name("gemm_nt/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_GemmNNAcc<kernels::serial::gemm_nn_acc>)->Name("gemm_nn_acc/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_GemmNNAcc<kernels::parallel::gemm_nn_acc>)->Name("gemm_nn_acc/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Assemble<kernels::serial::assemble_quaternion>)->Name("assemble_quaternion/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_Assemble<kernels::parallel::assemble_quaternion>)->Name("assemble_quaternion/parallel")->Arg(128)->Arg(512);
BENCHMARK(BM_Delta<false>)->Name("compute_delta/serial")->Arg(1000)->Arg(20000);
BENCHMARK(BM_Delta<true>)->Name("compute_delta/parallel")->Arg(1000)->Arg(20000);

BENCHMARK_MAIN();
