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

#include "emvc/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "emvc/common/error.hpp"

namespace emvc::kernels
{

namespace
{

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1U << 15;

template <typename Real>
Real sigmoid(Real z)
{
  return Real(1) / (Real(1) + std::exp(-z));
}

}  // namespace

void ConvGeometry::validate() const
{
  if (stride == 0) {
    throw ShapeError("conv2d: stride must be >= 1");
  }
  if (kernel == 0 || kernel > in_h || kernel > in_w) {
    throw ShapeError(
      "conv2d: kernel " + std::to_string(kernel) + " does not fit input " + std::to_string(in_h) +
      "x" + std::to_string(in_w));
  }
  if (in_c == 0 || out_c == 0) {
    throw ShapeError("conv2d: channel counts must be positive");
  }
}

template <typename Real>
void conv2d_forward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output)
{
  const std::size_t oh = g.out_h();
  const std::size_t ow = g.out_w();
  const std::size_t k = g.kernel;
  const std::size_t s = g.stride;
  const std::size_t co = g.out_c;
  const std::size_t row_len = k * g.in_c;
  const Real * __restrict in = input.data();
  const Real * __restrict w = weights.data();
  const Real * __restrict b = bias.data();
  Real * __restrict out = output.data();

#pragma omp parallel for schedule(static) if (g.macs() > kParallelWork)
  for (std::ptrdiff_t oy = 0; oy < static_cast<std::ptrdiff_t>(oh); ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      Real * __restrict o = out + (oy * ow + ox) * co;
      std::copy(b, b + co, o);
      for (std::size_t ky = 0; ky < k; ++ky) {
        const Real * row = in + ((oy * s + ky) * g.in_w + ox * s) * g.in_c;
        const Real * wk = w + ky * row_len * co;
        for (std::size_t j = 0; j < row_len; ++j) {
          const Real xv = row[j];
          if (xv == Real(0)) {
            continue;
          }
          const Real * wj = wk + j * co;
#pragma omp simd
          for (std::size_t c = 0; c < co; ++c) {
            o[c] += xv * wj[c];
          }
        }
      }
    }
  }
}

template <typename Real>
void conv2d_backward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_input, std::span<Real> grad_weights,
  std::span<Real> grad_bias)
{
  const std::size_t oh = g.out_h();
  const std::size_t ow = g.out_w();
  const std::size_t k = g.kernel;
  const std::size_t s = g.stride;
  const std::size_t co = g.out_c;
  const std::size_t row_len = k * g.in_c;
  const Real * __restrict in = input.data();
  const Real * __restrict w = weights.data();
  const Real * __restrict dout = grad_output.data();

  if (!grad_bias.empty()) {
    Real * __restrict db = grad_bias.data();
    for (std::size_t p = 0; p < oh * ow; ++p) {
      const Real * d = dout + p * co;
      for (std::size_t c = 0; c < co; ++c) {
        db[c] += d[c];
      }
    }
  }

  if (!grad_weights.empty()) {
    Real * __restrict dw = grad_weights.data();
    // Each kernel row ky owns a disjoint slice of dw.
#pragma omp parallel for schedule(static) if (g.macs() > kParallelWork)
    for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(k); ++ky) {
      Real * dwk = dw + ky * row_len * co;
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const Real * d = dout + (oy * ow + ox) * co;
          const Real * row = in + ((oy * s + ky) * g.in_w + ox * s) * g.in_c;
          for (std::size_t j = 0; j < row_len; ++j) {
            const Real xv = row[j];
            if (xv == Real(0)) {
              continue;
            }
            Real * __restrict dwj = dwk + j * co;
#pragma omp simd
            for (std::size_t c = 0; c < co; ++c) {
              dwj[c] += xv * d[c];
            }
          }
        }
      }
    }
  }

  if (!grad_input.empty()) {
    Real * __restrict din = grad_input.data();
    // Gather formulation: each input row is written by one thread only.
#pragma omp parallel for schedule(static) if (g.macs() > kParallelWork)
    for (std::ptrdiff_t iy = 0; iy < static_cast<std::ptrdiff_t>(g.in_h); ++iy) {
      Real * din_row = din + iy * g.in_w * g.in_c;
      for (std::size_t ky = 0; ky < k && ky <= static_cast<std::size_t>(iy); ++ky) {
        const std::size_t diff = static_cast<std::size_t>(iy) - ky;
        if (diff % s != 0 || diff / s >= oh) {
          continue;
        }
        const std::size_t oy = diff / s;
        const Real * wk = w + ky * row_len * co;
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const Real * d = dout + (oy * ow + ox) * co;
          Real * dst = din_row + ox * s * g.in_c;
          for (std::size_t j = 0; j < row_len; ++j) {
            const Real * wj = wk + j * co;
            Real acc = 0;
#pragma omp simd reduction(+ : acc)
            for (std::size_t c = 0; c < co; ++c) {
              acc += wj[c] * d[c];
            }
            dst[j] += acc;
          }
        }
      }
    }
  }
}

template <typename Real>
void affine_forward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output)
{
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  const Real * __restrict xs = x.data();
  const Real * __restrict w = weights.data();
  Real * __restrict out = output.data();
  if (bias.empty()) {
    std::fill(out, out + m, Real(0));
  } else {
    std::copy(bias.begin(), bias.end(), out);
  }

#pragma omp parallel for schedule(static) if (n * m > kParallelWork)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(blocks); ++blk) {
    const std::size_t c0 = blk * kBlock;
    const std::size_t c1 = std::min(m, c0 + kBlock);
    for (std::size_t i = 0; i < n; ++i) {
      const Real xv = xs[i];
      if (xv == Real(0)) {
        continue;
      }
      const Real * wrow = w + i * m;
#pragma omp simd
      for (std::size_t c = c0; c < c1; ++c) {
        out[c] += xv * wrow[c];
      }
    }
  }
}

template <typename Real>
void affine_backward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_x, std::span<Real> grad_weights,
  std::span<Real> grad_bias)
{
  const Real * __restrict xs = x.data();
  const Real * __restrict w = weights.data();
  const Real * __restrict d = grad_output.data();
  if (!grad_bias.empty()) {
    for (std::size_t c = 0; c < m; ++c) {
      grad_bias[c] += d[c];
    }
  }
  if (!grad_weights.empty()) {
    Real * __restrict dw = grad_weights.data();
#pragma omp parallel for schedule(static) if (n * m > kParallelWork)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const Real xv = xs[i];
      if (xv == Real(0)) {
        continue;
      }
      Real * dwrow = dw + i * m;
#pragma omp simd
      for (std::size_t c = 0; c < m; ++c) {
        dwrow[c] += xv * d[c];
      }
    }
  }
  if (!grad_x.empty()) {
    Real * __restrict dx = grad_x.data();
#pragma omp parallel for schedule(static) if (n * m > kParallelWork)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const Real * wrow = w + i * m;
      Real acc = 0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t c = 0; c < m; ++c) {
        acc += wrow[c] * d[c];
      }
      dx[i] += acc;
    }
  }
}

template <typename Real>
void lstm_forward(
  std::size_t d, std::size_t u, std::span<const Real> x, std::span<const Real> h_prev,
  std::span<const Real> c_prev, std::span<const Real> w_x, std::span<const Real> w_h,
  std::span<const Real> bias, std::span<Real> state_out, std::span<Real> gates,
  std::span<Real> tanh_c)
{
  const std::size_t g4 = 4 * u;
  std::vector<Real> z(g4);
  std::vector<Real> zh(g4);
  affine_forward<Real>(d, g4, x, w_x, bias, z);
  affine_forward<Real>(u, g4, h_prev, w_h, {}, zh);
  for (std::size_t j = 0; j < g4; ++j) {
    z[j] += zh[j];
  }
  for (std::size_t j = 0; j < u; ++j) {
    const Real ig = sigmoid(z[j]);
    const Real fg = sigmoid(z[u + j]);
    const Real cg = std::tanh(z[2 * u + j]);
    const Real og = sigmoid(z[3 * u + j]);
    const Real c = fg * c_prev[j] + ig * cg;
    const Real tc = std::tanh(c);
    gates[j] = ig;
    gates[u + j] = fg;
    gates[2 * u + j] = cg;
    gates[3 * u + j] = og;
    tanh_c[j] = tc;
    state_out[j] = og * tc;
    state_out[u + j] = c;
  }
}

template <typename Real>
void lstm_backward(
  std::size_t d, std::size_t u, std::span<const Real> x, std::span<const Real> h_prev,
  std::span<const Real> c_prev, std::span<const Real> w_x, std::span<const Real> w_h,
  std::span<const Real> gates, std::span<const Real> tanh_c, std::span<const Real> grad_state,
  std::span<Real> grad_x, std::span<Real> grad_h, std::span<Real> grad_c,
  std::span<Real> grad_w_x, std::span<Real> grad_w_h, std::span<Real> grad_bias)
{
  const std::size_t g4 = 4 * u;
  std::vector<Real> dz(g4);
  for (std::size_t j = 0; j < u; ++j) {
    const Real ig = gates[j];
    const Real fg = gates[u + j];
    const Real cg = gates[2 * u + j];
    const Real og = gates[3 * u + j];
    const Real tc = tanh_c[j];
    const Real dh = grad_state[j];
    const Real dc = grad_state[u + j] + dh * og * (Real(1) - tc * tc);
    dz[j] = dc * cg * ig * (Real(1) - ig);
    dz[u + j] = dc * c_prev[j] * fg * (Real(1) - fg);
    dz[2 * u + j] = dc * ig * (Real(1) - cg * cg);
    dz[3 * u + j] = dh * tc * og * (Real(1) - og);
    if (!grad_c.empty()) {
      grad_c[j] += dc * fg;
    }
  }
  affine_backward<Real>(d, g4, x, w_x, dz, grad_x, grad_w_x, grad_bias);
  affine_backward<Real>(u, g4, h_prev, w_h, dz, grad_h, grad_w_h, {});
}

#define EMVC_INSTANTIATE_KERNELS(Real)                                                            \
  template void conv2d_forward<Real>(                                                             \
    const ConvGeometry &, std::span<const Real>, std::span<const Real>, std::span<const Real>,    \
    std::span<Real>);                                                                             \
  template void conv2d_backward<Real>(                                                            \
    const ConvGeometry &, std::span<const Real>, std::span<const Real>, std::span<const Real>,    \
    std::span<Real>, std::span<Real>, std::span<Real>);                                           \
  template void affine_forward<Real>(                                                             \
    std::size_t, std::size_t, std::span<const Real>, std::span<const Real>,                       \
    std::span<const Real>, std::span<Real>);                                                      \
  template void affine_backward<Real>(                                                            \
    std::size_t, std::size_t, std::span<const Real>, std::span<const Real>,                       \
    std::span<const Real>, std::span<Real>, std::span<Real>, std::span<Real>);                    \
  template void lstm_forward<Real>(                                                               \
    std::size_t, std::size_t, std::span<const Real>, std::span<const Real>,                       \
    std::span<const Real>, std::span<const Real>, std::span<const Real>, std::span<const Real>,   \
    std::span<Real>, std::span<Real>, std::span<Real>);                                           \
  template void lstm_backward<Real>(                                                              \
    std::size_t, std::size_t, std::span<const Real>, std::span<const Real>,                       \
    std::span<const Real>, std::span<const Real>, std::span<const Real>, std::span<const Real>,   \
    std::span<const Real>, std::span<const Real>, std::span<Real>, std::span<Real>,               \
    std::span<Real>, std::span<Real>, std::span<Real>, std::span<Real>);

EMVC_INSTANTIATE_KERNELS(float)
EMVC_INSTANTIATE_KERNELS(double)

#undef EMVC_INSTANTIATE_KERNELS

}  // namespace emvc::kernels
