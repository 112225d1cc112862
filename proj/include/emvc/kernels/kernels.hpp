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

#ifndef EMVC__KERNELS__KERNELS_HPP_
#define EMVC__KERNELS__KERNELS_HPP_

#include <cstddef>
#include <span>

// Dense numeric kernels behind the autodiff ops.
//
// Layouts: images are HWC row-major, convolution weights are [k][k][Cin][Cout],
// affine weights are [n][m] (input-major). Every backward kernel accumulates
// (+=) into its gradient outputs; an empty span skips that gradient.
//
// The top-level functions are OpenMP-parallel. Work is partitioned so that each
// output element is written by exactly one thread in a fixed loop order, which
// keeps results bit-identical regardless of thread count. The `reference`
// namespace holds straightforward serial versions used as test oracles and as
// the benchmark baseline.

namespace emvc::kernels
{

struct ConvGeometry
{
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::size_t in_c = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t out_c = 0;

  std::size_t out_h() const { return (in_h - kernel) / stride + 1; }
  std::size_t out_w() const { return (in_w - kernel) / stride + 1; }
  std::size_t input_size() const { return in_h * in_w * in_c; }
  std::size_t weight_size() const { return kernel * kernel * in_c * out_c; }
  std::size_t output_size() const { return out_h() * out_w() * out_c; }
  std::size_t macs() const { return output_size() * kernel * kernel * in_c; }

  // Throws ShapeError when the kernel does not fit or stride is zero.
  void validate() const;
};

template <typename Real>
void conv2d_forward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output);

template <typename Real>
void conv2d_backward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_input, std::span<Real> grad_weights,
  std::span<Real> grad_bias);

// out[m] = bias[m] + sum_n x[n] * w[n][m]
template <typename Real>
void affine_forward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output);

template <typename Real>
void affine_backward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_x, std::span<Real> grad_weights,
  std::span<Real> grad_bias);

// One LSTM step. Gate order in the 4u pre-activation vector is (input, forget,
// candidate, output). `state_out` is [h'; c'] (2u). `gates` receives the
// post-activation gates (4u) and `tanh_c` receives tanh(c') (u); both are kept
// for the backward pass.
template <typename Real>
void lstm_forward(
  std::size_t d, std::size_t u, std::span<const Real> x, std::span<const Real> h_prev,
  std::span<const Real> c_prev, std::span<const Real> w_x, std::span<const Real> w_h,
  std::span<const Real> bias, std::span<Real> state_out, std::span<Real> gates,
  std::span<Real> tanh_c);

template <typename Real>
void lstm_backward(
  std::size_t d, std::size_t u, std::span<const Real> x, std::span<const Real> h_prev,
  std::span<const Real> c_prev, std::span<const Real> w_x, std::span<const Real> w_h,
  std::span<const Real> gates, std::span<const Real> tanh_c, std::span<const Real> grad_state,
  std::span<Real> grad_x, std::span<Real> grad_h, std::span<Real> grad_c,
  std::span<Real> grad_w_x, std::span<Real> grad_w_h, std::span<Real> grad_bias);

namespace reference
{

template <typename Real>
void conv2d_forward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output);

template <typename Real>
void conv2d_backward(
  const ConvGeometry & g, std::span<const Real> input, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_input, std::span<Real> grad_weights,
  std::span<Real> grad_bias);

template <typename Real>
void affine_forward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> bias, std::span<Real> output);

template <typename Real>
void affine_backward(
  std::size_t n, std::size_t m, std::span<const Real> x, std::span<const Real> weights,
  std::span<const Real> grad_output, std::span<Real> grad_x, std::span<Real> grad_weights,
  std::span<Real> grad_bias);

}  // namespace reference

}  // namespace emvc::kernels

#endif  // EMVC__KERNELS__KERNELS_HPP_
