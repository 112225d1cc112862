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

#include "emvc/autodiff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emvc/common/error.hpp"
#include "emvc/kernels/kernels.hpp"

namespace emvc::autodiff
{

const char * op_name(OpKind kind)
{
  switch (kind) {
    case OpKind::Constant: return "constant";
    case OpKind::Parameter: return "parameter";
    case OpKind::Conv2d: return "conv2d";
    case OpKind::Affine: return "affine";
    case OpKind::Relu: return "relu";
    case OpKind::Concat: return "concat";
    case OpKind::Slice: return "slice";
    case OpKind::Reshape: return "reshape";
    case OpKind::LstmCell: return "lstm_cell";
    case OpKind::SoftmaxCrossEntropy: return "softmax_cross_entropy";
    case OpKind::WeightedMae: return "weighted_mae";
    case OpKind::Add: return "add";
    case OpKind::Scale: return "scale";
  }
  return "unknown";
}

namespace
{

kernels::ConvGeometry conv_geometry(const Shape & in, const Shape & w, std::size_t stride)
{
  kernels::ConvGeometry g;
  g.in_h = in[0];
  g.in_w = in[1];
  g.in_c = in[2];
  g.kernel = w[0];
  g.stride = stride;
  g.out_c = w[3];
  return g;
}

template <typename Real>
void check_finite(const Tensor<Real> & t, OpKind kind)
{
  if (!t.all_finite()) {
    throw NumericError(std::string("non-finite value produced by ") + op_name(kind));
  }
}

}  // namespace

template <typename Real>
Var Graph<Real>::push(Node n)
{
  if (n.kind != OpKind::Constant && n.kind != OpKind::Parameter) {
    for (const auto id : n.inputs) {
      n.requires_grad = n.requires_grad || nodes_[id].requires_grad;
    }
    evaluate(n);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

template <typename Real>
auto Graph<Real>::node(Var v) const -> const Node &
{
  if (!v.valid() || v.id >= nodes_.size()) {
    throw ValueError("invalid graph variable");
  }
  return nodes_[v.id];
}

template <typename Real>
Var Graph<Real>::constant(TensorT value)
{
  Node n;
  n.kind = OpKind::Constant;
  check_finite(value, n.kind);
  n.value = std::move(value);
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::parameter(TensorT & param)
{
  if (const auto it = param_ids_.find(&param); it != param_ids_.end()) {
    return Var{it->second};
  }
  param.enable_grad();
  param_ids_.emplace(&param, static_cast<std::uint32_t>(nodes_.size()));
  Node n;
  n.kind = OpKind::Parameter;
  n.value = param;
  n.requires_grad = true;
  n.param = &param;
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::conv2d(Var input, Var weights, Var bias, std::size_t stride)
{
  const auto & in = node(input).value.dims();
  const auto & w = node(weights).value.dims();
  const auto & b = node(bias).value.dims();
  if (in.size() != 3) {
    throw ShapeError("conv2d: input must be HxWxC, got " + shape_string(in));
  }
  if (w.size() != 4 || w[0] != w[1]) {
    throw ShapeError("conv2d: weights must be k x k x Cin x Cout, got " + shape_string(w));
  }
  if (w[2] != in[2]) {
    throw ShapeError(
      "conv2d: input channels " + std::to_string(in[2]) + " != weight input channels " +
      std::to_string(w[2]));
  }
  if (b.size() != 1 || b[0] != w[3]) {
    throw ShapeError(
      "conv2d: bias dims " + shape_string(b) + " != output channels " + std::to_string(w[3]));
  }
  if (w[0] > in[0] || w[0] > in[1]) {
    throw ShapeError(
      "conv2d: kernel " + std::to_string(w[0]) + " exceeds input height " + std::to_string(in[0]) +
      " or width " + std::to_string(in[1]));
  }
  if (stride == 0) {
    throw ShapeError("conv2d: stride must be >= 1");
  }
  Node n;
  n.kind = OpKind::Conv2d;
  n.inputs = {input.id, weights.id, bias.id};
  n.attr0 = stride;
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::affine(Var input, Var weights, Var bias)
{
  const auto n_in = node(input).value.size();
  const auto & w = node(weights).value.dims();
  const auto & b = node(bias).value.dims();
  if (w.size() != 2 || w[0] != n_in) {
    throw ShapeError(
      "affine: input has " + std::to_string(n_in) + " values but weights are " + shape_string(w));
  }
  if (b.size() != 1 || b[0] != w[1]) {
    throw ShapeError("affine: bias dims " + shape_string(b) + " != weights " + shape_string(w));
  }
  Node n;
  n.kind = OpKind::Affine;
  n.inputs = {input.id, weights.id, bias.id};
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::relu(Var x)
{
  node(x);
  Node n;
  n.kind = OpKind::Relu;
  n.inputs = {x.id};
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::concat(std::span<const Var> parts)
{
  if (parts.empty()) {
    throw ShapeError("concat: no inputs");
  }
  Node n;
  n.kind = OpKind::Concat;
  for (const auto p : parts) {
    node(p);
    n.inputs.push_back(p.id);
  }
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::slice(Var x, std::size_t offset, std::size_t length)
{
  const auto size = node(x).value.size();
  if (length == 0 || offset + length > size) {
    throw ShapeError(
      "slice: [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
      ") out of range for " + std::to_string(size) + " values");
  }
  Node n;
  n.kind = OpKind::Slice;
  n.inputs = {x.id};
  n.attr0 = offset;
  n.attr1 = length;
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::reshape(Var x, Shape dims)
{
  const auto & src = node(x).value.dims();
  if (shape_size(dims) != shape_size(src)) {
    throw ShapeError("reshape: " + shape_string(src) + " to " + shape_string(dims));
  }
  Node n;
  n.kind = OpKind::Reshape;
  n.inputs = {x.id};
  n.value = TensorT(std::move(dims));
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::lstm_cell(Var x, Var h, Var c, Var w_x, Var w_h, Var bias)
{
  const auto d = node(x).value.size();
  const auto u = node(h).value.size();
  const auto & wx = node(w_x).value.dims();
  const auto & wh = node(w_h).value.dims();
  const auto & b = node(bias).value.dims();
  if (node(c).value.size() != u) {
    throw ShapeError(
      "lstm_cell: h has " + std::to_string(u) + " units but c has " +
      std::to_string(node(c).value.size()));
  }
  if (wx.size() != 2 || wx[0] != d || wx[1] != 4 * u) {
    throw ShapeError(
      "lstm_cell: w_x dims " + shape_string(wx) + " do not match input " + std::to_string(d) +
      " and 4x" + std::to_string(u) + " gates");
  }
  if (wh.size() != 2 || wh[0] != u || wh[1] != 4 * u) {
    throw ShapeError(
      "lstm_cell: w_h dims " + shape_string(wh) + " do not match " + std::to_string(u) + " units");
  }
  if (b.size() != 1 || b[0] != 4 * u) {
    throw ShapeError("lstm_cell: bias dims " + shape_string(b) + " != 4x" + std::to_string(u));
  }
  Node n;
  n.kind = OpKind::LstmCell;
  n.inputs = {x.id, h.id, c.id, w_x.id, w_h.id, bias.id};
  n.attr0 = d;
  n.attr1 = u;
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::softmax_cross_entropy(Var logits, TensorT target)
{
  const auto & ld = node(logits).value.dims();
  if (ld.size() < 1 || ld.size() > 2) {
    throw ShapeError("softmax_cross_entropy: logits must be [C] or [BxC], got " + shape_string(ld));
  }
  if (target.dims() != ld) {
    throw ShapeError(
      "softmax_cross_entropy: target dims " + shape_string(target.dims()) + " != logits " +
      shape_string(ld));
  }
  const std::size_t classes = ld.back();
  const std::size_t rows = target.size() / classes;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t ones = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      const Real t = target[r * classes + k];
      if (t == Real(1)) {
        ++ones;
      } else if (t != Real(0)) {
        throw ValueError("softmax_cross_entropy: target row " + std::to_string(r) + " is not one-hot");
      }
    }
    if (ones != 1) {
      throw ValueError("softmax_cross_entropy: target row " + std::to_string(r) + " is not one-hot");
    }
  }
  Node n;
  n.kind = OpKind::SoftmaxCrossEntropy;
  n.inputs = {logits.id};
  n.attr0 = rows;
  n.attr1 = classes;
  n.aux_target = std::move(target);
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::weighted_mae(Var pred, TensorT target, TensorT weights)
{
  const auto size = node(pred).value.size();
  if (target.size() != size || weights.size() != size) {
    throw ShapeError(
      "weighted_mae: pred has " + std::to_string(size) + " values, target " +
      std::to_string(target.size()) + ", weights " + std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > Real(0))) {
      throw ValueError("weighted_mae: weight " + std::to_string(i) + " is not positive");
    }
  }
  Node n;
  n.kind = OpKind::WeightedMae;
  n.inputs = {pred.id};
  n.aux_target = std::move(target);
  n.aux_weights = std::move(weights);
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::add(Var a, Var b)
{
  if (node(a).value.size() != node(b).value.size()) {
    throw ShapeError(
      "add: " + shape_string(node(a).value.dims()) + " vs " + shape_string(node(b).value.dims()));
  }
  Node n;
  n.kind = OpKind::Add;
  n.inputs = {a.id, b.id};
  return push(std::move(n));
}

template <typename Real>
Var Graph<Real>::scale(Var x, Real factor)
{
  node(x);
  Node n;
  n.kind = OpKind::Scale;
  n.inputs = {x.id};
  n.factor = factor;
  return push(std::move(n));
}

template <typename Real>
auto Graph<Real>::value(Var v) const -> const TensorT &
{
  return node(v).value;
}

template <typename Real>
std::span<const Real> Graph<Real>::grad(Var v) const
{
  return node(v).grad;
}

template <typename Real>
OpKind Graph<Real>::kind(Var v) const
{
  return node(v).kind;
}

template <typename Real>
std::span<const std::uint32_t> Graph<Real>::inputs(Var v) const
{
  return node(v).inputs;
}

template <typename Real>
void Graph<Real>::evaluate(Node & n)
{
  auto in = [&](std::size_t i) -> const TensorT & { return nodes_[n.inputs[i]].value; };

  switch (n.kind) {
    case OpKind::Constant:
      return;
    case OpKind::Parameter:
      n.value = *n.param;
      break;
    case OpKind::Conv2d: {
      const auto g = conv_geometry(in(0).dims(), in(1).dims(), n.attr0);
      n.value = TensorT(Shape{g.out_h(), g.out_w(), g.out_c});
      kernels::conv2d_forward<Real>(g, in(0).data(), in(1).data(), in(2).data(), n.value.data());
      break;
    }
    case OpKind::Affine: {
      const auto & w = in(1).dims();
      n.value = TensorT(Shape{w[1]});
      kernels::affine_forward<Real>(
        w[0], w[1], in(0).data(), in(1).data(), in(2).data(), n.value.data());
      break;
    }
    case OpKind::Relu: {
      n.value = in(0);
      for (auto & v : n.value.data()) {
        v = v > Real(0) ? v : Real(0);
      }
      break;
    }
    case OpKind::Concat: {
      std::size_t total = 0;
      for (const auto id : n.inputs) {
        total += nodes_[id].value.size();
      }
      n.value = TensorT(Shape{total});
      auto dst = n.value.data().begin();
      for (const auto id : n.inputs) {
        const auto src = nodes_[id].value.data();
        dst = std::copy(src.begin(), src.end(), dst);
      }
      break;
    }
    case OpKind::Slice: {
      const auto src = in(0).data().subspan(n.attr0, n.attr1);
      n.value = TensorT(Shape{n.attr1}, std::vector<Real>(src.begin(), src.end()));
      break;
    }
    case OpKind::Reshape: {
      const Shape dims = n.value.dims();
      n.value = TensorT(dims, in(0).storage());
      break;
    }
    case OpKind::LstmCell: {
      const std::size_t d = n.attr0;
      const std::size_t u = n.attr1;
      n.value = TensorT(Shape{2 * u});
      n.saved.assign(5 * u, Real(0));
      std::span<Real> saved(n.saved);
      kernels::lstm_forward<Real>(
        d, u, in(0).data(), in(1).data(), in(2).data(), in(3).data(), in(4).data(), in(5).data(),
        n.value.data(), saved.subspan(0, 4 * u), saved.subspan(4 * u, u));
      break;
    }
    case OpKind::SoftmaxCrossEntropy: {
      const std::size_t rows = n.attr0;
      const std::size_t classes = n.attr1;
      const auto logits = in(0).data();
      n.saved.assign(rows * classes, Real(0));
      Real loss = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto row = logits.subspan(r * classes, classes);
        const Real peak = *std::max_element(row.begin(), row.end());
        Real denom = 0;
        for (std::size_t k = 0; k < classes; ++k) {
          denom += std::exp(row[k] - peak);
        }
        const Real log_denom = std::log(denom);
        for (std::size_t k = 0; k < classes; ++k) {
          const Real log_p = row[k] - peak - log_denom;
          n.saved[r * classes + k] = std::exp(log_p);
          if (n.aux_target[r * classes + k] == Real(1)) {
            loss -= log_p;
          }
        }
      }
      n.value = TensorT::scalar(loss / static_cast<Real>(rows));
      break;
    }
    case OpKind::WeightedMae: {
      const auto pred = in(0).data();
      Real num = 0;
      Real den = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        num += n.aux_weights[i] * std::abs(pred[i] - n.aux_target[i]);
        den += n.aux_weights[i];
      }
      n.value = TensorT::scalar(num / den);
      break;
    }
    case OpKind::Add: {
      n.value = in(0);
      const auto b = in(1).data();
      auto out = n.value.data();
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += b[i];
      }
      break;
    }
    case OpKind::Scale: {
      n.value = in(0);
      for (auto & v : n.value.data()) {
        v *= n.factor;
      }
      break;
    }
  }
  check_finite(n.value, n.kind);
}

template <typename Real>
std::vector<Real> & Graph<Real>::grad_of(std::uint32_t id)
{
  return nodes_[id].grad;
}

template <typename Real>
void Graph<Real>::backprop(Node & n)
{
  const std::span<const Real> dy(n.grad);
  auto wants = [&](std::size_t i) { return nodes_[n.inputs[i]].requires_grad; };
  auto gin = [&](std::size_t i) -> std::span<Real> {
    return wants(i) ? std::span<Real>(grad_of(n.inputs[i])) : std::span<Real>();
  };
  auto in = [&](std::size_t i) -> const TensorT & { return nodes_[n.inputs[i]].value; };

  switch (n.kind) {
    case OpKind::Constant:
    case OpKind::Parameter:
      return;
    case OpKind::Conv2d: {
      const auto g = conv_geometry(in(0).dims(), in(1).dims(), n.attr0);
      if (fault_ == BackwardFault::ConvWeightSignFlip && wants(1)) {
        std::vector<Real> dw(in(1).size(), Real(0));
        kernels::conv2d_backward<Real>(
          g, in(0).data(), in(1).data(), dy, gin(0), dw, gin(2));
        auto dst = gin(1);
        for (std::size_t i = 0; i < dw.size(); ++i) {
          dst[i] -= dw[i];
        }
      } else {
        kernels::conv2d_backward<Real>(g, in(0).data(), in(1).data(), dy, gin(0), gin(1), gin(2));
      }
      break;
    }
    case OpKind::Affine: {
      const auto & w = in(1).dims();
      kernels::affine_backward<Real>(
        w[0], w[1], in(0).data(), in(1).data(), dy, gin(0), gin(1), gin(2));
      break;
    }
    case OpKind::Relu: {
      if (wants(0)) {
        auto dx = gin(0);
        const auto y = n.value.data();
        for (std::size_t i = 0; i < dx.size(); ++i) {
          if (y[i] > Real(0)) {
            dx[i] += dy[i];
          }
        }
      }
      break;
    }
    case OpKind::Concat: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const auto len = nodes_[n.inputs[k]].value.size();
        if (wants(k)) {
          auto dx = gin(k);
          for (std::size_t i = 0; i < len; ++i) {
            dx[i] += dy[offset + i];
          }
        }
        offset += len;
      }
      break;
    }
    case OpKind::Slice: {
      if (wants(0)) {
        auto dx = gin(0);
        for (std::size_t i = 0; i < n.attr1; ++i) {
          dx[n.attr0 + i] += dy[i];
        }
      }
      break;
    }
    case OpKind::Reshape: {
      if (wants(0)) {
        auto dx = gin(0);
        for (std::size_t i = 0; i < dx.size(); ++i) {
          dx[i] += dy[i];
        }
      }
      break;
    }
    case OpKind::LstmCell: {
      const std::size_t d = n.attr0;
      const std::size_t u = n.attr1;
      const std::span<const Real> saved(n.saved);
      kernels::lstm_backward<Real>(
        d, u, in(0).data(), in(1).data(), in(2).data(), in(3).data(), in(4).data(),
        saved.subspan(0, 4 * u), saved.subspan(4 * u, u), dy, gin(0), gin(1), gin(2), gin(3),
        gin(4), gin(5));
      break;
    }
    case OpKind::SoftmaxCrossEntropy: {
      if (wants(0)) {
        auto dx = gin(0);
        const Real s = dy[0] / static_cast<Real>(n.attr0);
        for (std::size_t i = 0; i < dx.size(); ++i) {
          dx[i] += s * (n.saved[i] - n.aux_target[i]);
        }
      }
      break;
    }
    case OpKind::WeightedMae: {
      if (wants(0)) {
        auto dx = gin(0);
        const auto pred = in(0).data();
        Real den = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
          den += n.aux_weights[i];
        }
        for (std::size_t i = 0; i < pred.size(); ++i) {
          const Real e = pred[i] - n.aux_target[i];
          const Real sign = e > Real(0) ? Real(1) : (e < Real(0) ? Real(-1) : Real(0));
          dx[i] += dy[0] * n.aux_weights[i] * sign / den;
        }
      }
      break;
    }
    case OpKind::Add: {
      for (std::size_t k = 0; k < 2; ++k) {
        if (wants(k)) {
          auto dx = gin(k);
          for (std::size_t i = 0; i < dx.size(); ++i) {
            dx[i] += dy[i];
          }
        }
      }
      break;
    }
    case OpKind::Scale: {
      if (wants(0)) {
        auto dx = gin(0);
        for (std::size_t i = 0; i < dx.size(); ++i) {
          dx[i] += n.factor * dy[i];
        }
      }
      break;
    }
  }
}

template <typename Real>
void Graph<Real>::backward(Var loss)
{
  const auto & ln = node(loss);
  if (ln.value.size() != 1) {
    throw ShapeError("backward: loss must be scalar, got " + shape_string(ln.value.dims()));
  }
  for (auto & n : nodes_) {
    if (n.requires_grad) {
      n.grad.assign(n.value.size(), Real(0));
    } else {
      n.grad.clear();
    }
  }
  if (!ln.requires_grad) {
    return;
  }
  nodes_[loss.id].grad[0] = Real(1);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    auto & n = nodes_[i];
    if (n.requires_grad) {
      backprop(n);
    }
  }
  for (auto & n : nodes_) {
    if (n.kind != OpKind::Parameter) {
      continue;
    }
    auto dst = n.param->grad();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (!std::isfinite(n.grad[i])) {
        throw NumericError("non-finite gradient in backward pass");
      }
      dst[i] += n.grad[i];
    }
  }
}

template <typename Real>
void Graph<Real>::replay()
{
  for (auto & n : nodes_) {
    evaluate(n);
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace emvc::autodiff
