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

#include <cstddef>
#include <span>

#include "emvc/kernels/kernels.hpp"

// Textbook loop nests, written for obviousness rather than speed.

namespace emvc::kernels::reference
{

template <typename Real>
void conv2d_forward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output)
{
  const auto oh = g.out_h();
  const auto ow = g.out_w();
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t oc = 0; oc < g.out_c; ++oc) {
        Real acc = bias[oc];
        for (std::size_t ky = 0; ky < g.kernel; ++ky) {
          for (std::size_t kx = 0; kx < g.kernel; ++kx) {
            for (std::size_t ic = 0; ic < g.in_c; ++ic) {
              const auto iy = oy * g.stride + ky;
              const auto ix = ox * g.stride + kx;
              const Real xv = input[(iy * g.in_w + ix) * g.in_c + ic];
              const Real wv = weights[((ky * g.kernel + kx) * g.in_c + ic) * g.out_c + oc];
              acc += xv * wv;
            }
          }
        }
        output[(oy * ow + ox) * g.out_c + oc] = acc;
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
  const auto oh = g.out_h();
  const auto ow = g.out_w();
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t oc = 0; oc < g.out_c; ++oc) {
        const Real d = grad_output[(oy * ow + ox) * g.out_c + oc];
        if (!grad_bias.empty()) {
          grad_bias[oc] += d;
        }
        for (std::size_t ky = 0; ky < g.kernel; ++ky) {
          for (std::size_t kx = 0; kx < g.kernel; ++kx) {
            for (std::size_t ic = 0; ic < g.in_c; ++ic) {
              const auto iy = oy * g.stride + ky;
              const auto ix = ox * g.stride + kx;
              const auto in_idx = (iy * g.in_w + ix) * g.in_c + ic;
              const auto w_idx = ((ky * g.kernel + kx) * g.in_c + ic) * g.out_c + oc;
              if (!grad_weights.empty()) {
                grad_weights[w_idx] += input[in_idx] * d;
              }
              if (!grad_input.empty()) {
                grad_input[in_idx] += weights[w_idx] * d;
              }
            }
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
  for (std::size_t c = 0; c < m; ++c) {
    Real acc = bias.empty() ? Real(0) : bias[c];
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * weights[i * m + c];
    }
    output[c] = acc;
  }
}

template <typename Real>
void affine_backward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_x, std::span<Real> grad_weights,
  std::span<Real> grad_bias)
{
  for (std::size_t c = 0; c < m; ++c) {
    if (!grad_bias.empty()) {
      grad_bias[c] += grad_output[c];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!grad_weights.empty()) {
        grad_weights[i * m + c] += x[i] * grad_output[c];
      }
      if (!grad_x.empty()) {
        grad_x[i] += weights[i * m + c] * grad_output[c];
      }
    }
  }
}

template void conv2d_forward<double>(
  const ConvGeometry &, std::span<const double>, std::span<const double>, std::span<const double>,
  std::span<double>);
template void conv2d_forward<float>(
  const ConvGeometry &, std::span<const float>, std::span<const float>, std::span<const float>,
  std::span<float>);
template void conv2d_backward<double>(
  const ConvGeometry &, std::span<const double>, std::span<const double>, std::span<const double>,
  std::span<double>, std::span<double>, std::span<double>);
template void conv2d_backward<float>(
  const ConvGeometry &, std::span<const float>, std::span<const float>, std::span<const float>,
  std::span<float>, std::span<float>, std::span<float>);
template void affine_forward<double>(
  std::size_t, std::size_t, std::span<const double>, std::span<const double>,
  std::span<const double>, std::span<double>);
template void affine_forward<float>(
  std::size_t, std::size_t, std::span<const float>, std::span<const float>,
  std::span<const float>, std::span<float>);
template void affine_backward<double>(
  std::size_t, std::size_t, std::span<const double>, std::span<const double>,
  std::span<const double>, std::span<double>, std::span<double>, std::span<double>);
template void affine_backward<float>(
  std::size_t, std::size_t, std::span<const float>, std::span<const float>,
  std::span<const float>, std::span<float>, std::span<float>, std::span<float>);

}  // namespace emvc::kernels::reference
