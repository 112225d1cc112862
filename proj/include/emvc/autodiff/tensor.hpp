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

#ifndef EMVC__AUTODIFF__TENSOR_HPP_
#define EMVC__AUTODIFF__TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emvc/common/error.hpp"

namespace emvc::autodiff
{

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape & dims)
{
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape & dims)
{
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) {
      s += "x";
    }
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

// Dense row-major array with an optional same-shape gradient buffer.
template <typename Real>
class Tensor
{
public:
  using value_type = Real;

  Tensor() = default;

  explicit Tensor(Shape dims, Real fill = Real(0)) : dims_(std::move(dims))
  {
    validate_dims();
    data_.assign(shape_size(dims_), fill);
  }

  Tensor(Shape dims, std::vector<Real> data) : dims_(std::move(dims)), data_(std::move(data))
  {
    validate_dims();
    if (shape_size(dims_) != data_.size()) {
      throw ShapeError(
        "tensor dims " + shape_string(dims_) + " hold " + std::to_string(shape_size(dims_)) +
        " values, got " + std::to_string(data_.size()));
    }
  }

  static Tensor scalar(Real v) { return Tensor(Shape{1}, std::vector<Real>{v}); }

  static Tensor vector(std::vector<Real> values)
  {
    const auto n = values.size();
    return Tensor(Shape{n}, std::move(values));
  }

  const Shape & dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }
  std::vector<Real> & storage() { return data_; }
  const std::vector<Real> & storage() const { return data_; }

  Real & operator[](std::size_t i) { return data_[i]; }
  Real operator[](std::size_t i) const { return data_[i]; }

  Real item() const
  {
    if (data_.size() != 1) {
      throw ShapeError("item() on tensor of dims " + shape_string(dims_));
    }
    return data_[0];
  }

  // Reinterprets the same row-major data under new dims of equal volume.
  void reshape(Shape dims)
  {
    if (shape_size(dims) != data_.size()) {
      throw ShapeError("cannot reshape " + shape_string(dims_) + " to " + shape_string(dims));
    }
    dims_ = std::move(dims);
    if (has_grad_) {
      grad_.resize(data_.size());
    }
  }

  bool has_grad() const { return has_grad_; }

  void enable_grad()
  {
    if (!has_grad_) {
      grad_.assign(data_.size(), Real(0));
      has_grad_ = true;
    }
  }

  void zero_grad()
  {
    if (has_grad_) {
      std::fill(grad_.begin(), grad_.end(), Real(0));
    }
  }

  std::span<Real> grad() { return grad_; }
  std::span<const Real> grad() const { return grad_; }

  bool all_finite() const
  {
    return std::all_of(data_.begin(), data_.end(), [](Real v) { return std::isfinite(v); });
  }

  template <typename Other>
  Tensor<Other> cast() const
  {
    std::vector<Other> out(data_.begin(), data_.end());
    return Tensor<Other>(dims_, std::move(out));
  }

private:
  void validate_dims() const
  {
    for (const auto d : dims_) {
      if (d == 0) {
        throw ShapeError("tensor dims must be positive, got " + shape_string(dims_));
      }
    }
  }

  Shape dims_;
  std::vector<Real> data_;
  std::vector<Real> grad_;
  bool has_grad_ = false;
};

}  // namespace emvc::autodiff

#endif  // EMVC__AUTODIFF__TENSOR_HPP_
