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

#ifndef EMVC__AUTODIFF__GRAPH_HPP_
#define EMVC__AUTODIFF__GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "emvc/autodiff/tensor.hpp"

namespace emvc::autodiff
{

enum class OpKind : std::uint8_t
{
  Constant,
  Parameter,
  Conv2d,
  Affine,
  Relu,
  Concat,
  Slice,
  Reshape,
  LstmCell,
  SoftmaxCrossEntropy,
  WeightedMae,
  Add,
  Scale,
};

const char * op_name(OpKind kind);

// Corrupted backward rules for mutation testing of the gradient checker.
enum class BackwardFault : std::uint8_t
{
  None,
  ConvWeightSignFlip,
};

struct Var
{
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t id = kInvalid;
  bool valid() const { return id != kInvalid; }
};

// Tape of operation records. Records are appended in execution order, so the
// tape is topologically sorted by construction and backward walks it in exact
// reverse. A graph is single-threaded; parameters it references must outlive it.
template <typename Real>
class Graph
{
public:
  using TensorT = Tensor<Real>;

  Var constant(TensorT value);
  // Registers `param` as a leaf. Repeated registration returns the same leaf, so
  // weights shared across frames or time steps accumulate into one gradient.
  Var parameter(TensorT & param);

  // input [H x W x Cin], weights [k x k x Cin x Cout], bias [Cout]; valid padding.
  Var conv2d(Var input, Var weights, Var bias, std::size_t stride);
  // input (any dims, n values), weights [n x m], bias [m] -> [m]
  Var affine(Var input, Var weights, Var bias);
  Var relu(Var x);
  // Flattens and joins inputs in order.
  Var concat(std::span<const Var> parts);
  Var slice(Var x, std::size_t offset, std::size_t length);
  Var reshape(Var x, Shape dims);
  // x [d], h [u], c [u], w_x [d x 4u], w_h [u x 4u], bias [4u] -> [h'; c'] (2u)
  Var lstm_cell(Var x, Var h, Var c, Var w_x, Var w_h, Var bias);
  // logits [C] or [B x C] against a constant one-hot target of the same dims;
  // mean over rows.
  Var softmax_cross_entropy(Var logits, TensorT target);
  // sum w_i |pred_i - target_i| / sum w_i with constant target and weights.
  Var weighted_mae(Var pred, TensorT target, TensorT weights);
  Var add(Var a, Var b);
  Var scale(Var x, Real factor);

  const TensorT & value(Var v) const;
  // Gradient of the last backward() loss w.r.t. v; empty if v needs no grad.
  std::span<const Real> grad(Var v) const;
  OpKind kind(Var v) const;
  std::span<const std::uint32_t> inputs(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Populates node gradients and accumulates (+=) into registered parameters.
  void backward(Var loss);

  // Re-executes every recorded op in order from the current parameter values.
  void replay();

  void set_fault(BackwardFault fault) { fault_ = fault; }

private:
  struct Node
  {
    OpKind kind = OpKind::Constant;
    std::vector<std::uint32_t> inputs;
    TensorT value;
    std::vector<Real> grad;
    bool requires_grad = false;
    std::size_t attr0 = 0;
    std::size_t attr1 = 0;
    Real factor = Real(1);
    std::vector<Real> saved;
    TensorT aux_target;
    TensorT aux_weights;
    TensorT * param = nullptr;
  };

  Var push(Node node);
  const Node & node(Var v) const;
  void evaluate(Node & n);
  void backprop(Node & n);
  std::vector<Real> & grad_of(std::uint32_t id);

  std::vector<Node> nodes_;
  std::unordered_map<const TensorT *, std::uint32_t> param_ids_;
  BackwardFault fault_ = BackwardFault::None;
};

// Numerically stable softmax over a logit vector.
template <typename Real>
std::vector<double> softmax(std::span<const Real> logits)
{
  double peak = logits.empty() ? 0.0 : static_cast<double>(logits[0]);
  for (const auto v : logits) {
    peak = std::max(peak, static_cast<double>(v));
  }
  std::vector<double> p(logits.size());
  double sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - peak);
    sum += p[i];
  }
  for (auto & v : p) {
    v /= sum;
  }
  return p;
}

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace emvc::autodiff

#endif  // EMVC__AUTODIFF__GRAPH_HPP_
