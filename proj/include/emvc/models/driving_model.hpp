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

#ifndef EMVC__MODELS__DRIVING_MODEL_HPP_
#define EMVC__MODELS__DRIVING_MODEL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "emvc/autodiff/graph.hpp"
#include "emvc/autodiff/parameters.hpp"
#include "emvc/autodiff/tensor.hpp"
#include "emvc/common/speed_command.hpp"
#include "emvc/models/model_config.hpp"

namespace emvc::models
{

using autodiff::Graph;
using autodiff::Tensor;
using autodiff::Var;

// Inputs for one prediction. `frames` holds one [S x S x 3] image (base, mmmt)
// or the sequence, oldest first (command). Pointers must outlive the call.
template <typename Real>
struct ModelInput
{
  std::vector<const Tensor<Real> *> frames;
  // Feedback speeds in m/s, oldest first; mmmt only.
  std::vector<double> speed_window;
};

struct Prediction
{
  double steering_deg = 0.0;
  std::optional<double> speed_mps;
  std::optional<std::array<double, kNumSpeedCommands>> command_logits;

  std::optional<SpeedCommand> command() const;
};

// Graph handles of the heads; invalid where the architecture has no such head.
struct Heads
{
  Var steering;
  Var speed;
  Var command_logits;
};

struct LossTarget
{
  double steering_deg = 0.0;
  double weight = 1.0;
  std::optional<double> speed_mps;
  std::optional<SpeedCommand> command;
};

struct LossTerms
{
  Var total;
  Var angle;
  // Invalid for the base model.
  Var second;
};

template <typename Real>
class DrivingModel
{
public:
  // Builds all parameters for `config` and initializes them from `seed`.
  DrivingModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig & config() const { return config_; }
  ModelKind kind() const { return config_.kind; }
  autodiff::ParameterStore<Real> & parameters() { return params_; }
  const autodiff::ParameterStore<Real> & parameters() const { return params_; }

  // Sets the loss-only settings (task weight, sample-weight shape). Throws
  // ConfigError if `config` differs in architecture.
  void set_loss_settings(const ModelConfig & config);

  // Records the forward pass with trainable parameter leaves.
  Heads forward(Graph<Real> & g, const ModelInput<Real> & input);

  // Inference on a private graph; does not touch parameter gradients.
  Prediction predict(const ModelInput<Real> & input) const;

  // Zeros the weights and bias of every output head.
  void zero_output_layers();

private:
  template <typename Bind>
  Heads build(Graph<Real> & g, const ModelInput<Real> & input, Bind bind) const;
  void check_input(const ModelInput<Real> & input) const;

  ModelConfig config_;
  autodiff::ParameterStore<Real> params_;
};

// Batch loss: weighted angle MAE plus task_weight times the second-task loss
// (speed MAE for mmmt, cross-entropy for command). `heads` and `targets` are
// parallel; each target must carry the heads of `kind`.
template <typename Real>
LossTerms composite_loss(
  Graph<Real> & g, ModelKind kind, std::span<const Heads> heads,
  std::span<const LossTarget> targets, double task_weight);

extern template class DrivingModel<float>;
extern template class DrivingModel<double>;

}  // namespace emvc::models

#endif  // EMVC__MODELS__DRIVING_MODEL_HPP_
