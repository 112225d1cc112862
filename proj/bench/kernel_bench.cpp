// Copyright 2026 The emvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel kernels vs the serial reference on the layer shapes the models use.
//
//   ./build/bench/emvc_kernel_bench --benchmark_filter=Conv
//   OMP_NUM_THREADS=4 ./build/bench/emvc_kernel_bench

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "emvc/kernels/kernels.hpp"

namespace
{

using emvc::kernels::ConvGeometry;

// (input side, channels in, kernel, stride, channels out)
const ConvGeometry kLayers[] = {
  {128, 128, 3, 11, 4, 24},  // default conv1
  {30, 30, 24, 5, 2, 36},    // default conv2
  {64, 64, 3, 5, 2, 12},     // compact conv1
  {30, 30, 12, 5, 2, 16},    // compact conv2
};

template <typename Real>
std::vector<Real> random_vec(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Real> v(n);
  for (auto & x : v) {
    x = static_cast<Real>(u(rng));
  }
  return v;
}

template <typename Real, bool kReference>
void BM_ConvForward(benchmark::State & state)
{
  const auto & g = kLayers[state.range(0)];
  const auto in = random_vec<Real>(g.input_size(), 1);
  const auto w = random_vec<Real>(g.weight_size(), 2);
  const auto b = random_vec<Real>(g.out_c, 3);
  std::vector<Real> out(g.output_size());
  for (auto _ : state) {
    if constexpr (kReference) {
      emvc::kernels::reference::conv2d_forward<Real>(g, in, w, b, out);
    } else {
      emvc::kernels::conv2d_forward<Real>(g, in, w, b, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["GFLOPS"] = benchmark::Counter(
    2.0 * static_cast<double>(g.macs()) * state.iterations() * 1e-9, benchmark::Counter::kIsRate);
}

template <typename Real, bool kReference>
void BM_ConvBackward(benchmark::State & state)
{
  const auto & g = kLayers[state.range(0)];
  const auto in = random_vec<Real>(g.input_size(), 1);
  const auto w = random_vec<Real>(g.weight_size(), 2);
  const auto dout = random_vec<Real>(g.output_size(), 3);
  std::vector<Real> din(g.input_size()), dw(g.weight_size()), db(g.out_c);
  for (auto _ : state) {
    if constexpr (kReference) {
      emvc::kernels::reference::conv2d_backward<Real>(g, in, w, dout, din, dw, db);
    } else {
      emvc::kernels::conv2d_backward<Real>(g, in, w, dout, din, dw, db);
    }
    benchmark::DoNotOptimize(dw.data());
  }
  state.counters["GFLOPS"] = benchmark::Counter(
    4.0 * static_cast<double>(g.macs()) * state.iterations() * 1e-9, benchmark::Counter::kIsRate);
}

template <typename Real, bool kReference>
void BM_Affine(benchmark::State & state)
{
  const std::size_t n = state.range(0);
  const std::size_t m = state.range(1);
  const auto x = random_vec<Real>(n, 1);
  const auto w = random_vec<Real>(n * m, 2);
  const auto b = random_vec<Real>(m, 3);
  std::vector<Real> out(m);
  for (auto _ : state) {
    if constexpr (kReference) {
      emvc::kernels::reference::affine_forward<Real>(n, m, x, w, b, out);
    } else {
      emvc::kernels::affine_forward<Real>(n, m, x, w, b, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_ConvForward<float, false>)->DenseRange(0, 3);
BENCHMARK(BM_ConvForward<float, true>)->DenseRange(0, 3);
BENCHMARK(BM_ConvForward<double, false>)->DenseRange(0, 3);
BENCHMARK(BM_ConvForward<double, true>)->DenseRange(0, 3);
BENCHMARK(BM_ConvBackward<float, false>)->DenseRange(0, 3);
BENCHMARK(BM_ConvBackward<float, true>)->DenseRange(0, 3);
BENCHMARK(BM_Affine<float, false>)->Args({256, 512})->Args({512, 128});
BENCHMARK(BM_Affine<float, true>)->Args({256, 512})->Args({512, 128});

BENCHMARK_MAIN();
