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

#include "emvc/autodiff/optimizer.hpp"

#include <cmath>

#include "emvc/common/error.hpp"

namespace emvc::autodiff
{

OptimizerConfig::Kind parse_optimizer_kind(const std::string & name)
{
  if (name == "adam") {
    return OptimizerConfig::Kind::Adam;
  }
  if (name == "sgd") {
    return OptimizerConfig::Kind::Sgd;
  }
  throw ConfigError("unknown optimizer `" + name + "` (expected adam|sgd)");
}

std::string optimizer_kind_name(OptimizerConfig::Kind kind)
{
  return kind == OptimizerConfig::Kind::Adam ? "adam" : "sgd";
}

template <typename Real>
void Optimizer<Real>::step(ParameterStore<Real> & params)
{
  for (const auto & e : params) {
    if (!e.tensor.has_grad()) {
      throw ValueError("optimizer: parameter `" + e.name + "` has no gradient");
    }
  }
  ++steps_;
  const Real lr = static_cast<Real>(config_.learning_rate);

  if (config_.kind == OptimizerConfig::Kind::Sgd) {
    for (auto & e : params) {
      auto w = e.tensor.data();
      const auto g = e.tensor.grad();
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] -= lr * g[i];
      }
    }
    return;
  }

  if (m_.empty()) {
    for (const auto & e : params) {
      m_.emplace_back(e.tensor.size(), Real(0));
      v_.emplace_back(e.tensor.size(), Real(0));
    }
  }
  if (m_.size() != params.size()) {
    throw ValueError("optimizer: parameter store layout changed between steps");
  }
  const Real b1 = static_cast<Real>(config_.beta1);
  const Real b2 = static_cast<Real>(config_.beta2);
  const Real eps = static_cast<Real>(config_.epsilon);
  const Real c1 = static_cast<Real>(1.0 - std::pow(config_.beta1, static_cast<double>(steps_)));
  const Real c2 = static_cast<Real>(1.0 - std::pow(config_.beta2, static_cast<double>(steps_)));

  std::size_t k = 0;
  for (auto & e : params) {
    auto w = e.tensor.data();
    const auto g = e.tensor.grad();
    auto & m = m_[k];
    auto & v = v_[k];
    ++k;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (Real(1) - b1) * g[i];
      v[i] = b2 * v[i] + (Real(1) - b2) * g[i] * g[i];
      const Real m_hat = m[i] / c1;
      const Real v_hat = v[i] / c2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template <typename Real>
void Optimizer<Real>::save_state(ByteWriter & out) const
{
  out.put_u64(steps_);
  out.put_u32(static_cast<std::uint32_t>(m_.size()));
  for (std::size_t k = 0; k < m_.size(); ++k) {
    out.put_u32(static_cast<std::uint32_t>(m_[k].size()));
    for (std::size_t i = 0; i < m_[k].size(); ++i) {
      out.put_f64(static_cast<double>(m_[k][i]));
      out.put_f64(static_cast<double>(v_[k][i]));
    }
  }
}

template <typename Real>
void Optimizer<Real>::load_state(ByteReader & in, const ParameterStore<Real> & params)
{
  steps_ = in.get_u64();
  const auto count = in.get_u32();
  if (count != 0 && count != params.size()) {
    throw FormatError("optimizer state holds " + std::to_string(count) + " moment buffers");
  }
  m_.clear();
  v_.clear();
  auto it = params.begin();
  for (std::uint32_t k = 0; k < count; ++k, ++it) {
    const auto n = in.get_u32();
    if (n != it->tensor.size()) {
      throw FormatError("optimizer state size mismatch for `" + it->name + "`");
    }
    std::vector<Real> m(n);
    std::vector<Real> v(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      m[i] = static_cast<Real>(in.get_f64());
      v[i] = static_cast<Real>(in.get_f64());
    }
    m_.push_back(std::move(m));
    v_.push_back(std::move(v));
  }
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace emvc::autodiff
