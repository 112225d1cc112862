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

#ifndef EMVC__AUTODIFF__OPTIMIZER_HPP_
#define EMVC__AUTODIFF__OPTIMIZER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "emvc/autodiff/parameters.hpp"
#include "emvc/common/binary_io.hpp"

namespace emvc::autodiff
{

struct OptimizerConfig
{
  enum class Kind
  {
    Adam,
    Sgd,
  };

  Kind kind = Kind::Adam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

OptimizerConfig::Kind parse_optimizer_kind(const std::string & name);
std::string optimizer_kind_name(OptimizerConfig::Kind kind);

// Adam or plain SGD over every tensor of a ParameterStore. Moment buffers are
// matched to parameters by position, so the store layout must not change
// between steps.
template <typename Real>
class Optimizer
{
public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  // Throws ValueError if a parameter carries no gradient buffer.
  void step(ParameterStore<Real> & params);

  std::uint64_t steps() const { return steps_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  const OptimizerConfig & config() const { return config_; }

  void save_state(ByteWriter & out) const;
  void load_state(ByteReader & in, const ParameterStore<Real> & params);

private:
  OptimizerConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<std::vector<Real>> m_;
  std::vector<std::vector<Real>> v_;
};

extern template class Optimizer<float>;
extern template class Optimizer<double>;

}  // namespace emvc::autodiff

#endif  // EMVC__AUTODIFF__OPTIMIZER_HPP_
