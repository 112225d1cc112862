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

#ifndef EMVC__TRAINING__EVALUATE_HPP_
#define EMVC__TRAINING__EVALUATE_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "emvc/common/speed_command.hpp"
#include "emvc/datapipe/shard.hpp"
#include "emvc/models/driving_model.hpp"

namespace emvc::training
{

struct EvalMetrics
{
  std::size_t count = 0;
  std::size_t discarded_low_speed = 0;
  double angle_mae_deg = 0.0;
  std::optional<double> speed_mae_mps;
  std::optional<double> command_accuracy;
  // confusion[true][predicted]
  std::optional<std::array<std::array<std::size_t, kNumSpeedCommands>, kNumSpeedCommands>> confusion;

  std::string format() const;
};

using Predictor = std::function<models::Prediction(const datapipe::Shard &, const datapipe::ExampleRecord &)>;

// Scores every example whose current speed is at least `low_speed_cutoff_mps`.
// Speed MAE is reported when predictions carry a speed, accuracy and the
// confusion matrix when they carry command logits.
EvalMetrics evaluate(
  const datapipe::Shard & shard, const Predictor & predictor, double low_speed_cutoff_mps = 4.0);

// Model input for one example: the last frame (or the sequence for the command
// net) and the recorded feedback window.
models::ModelInput<float> example_input(
  const models::DrivingModel<float> & model, const datapipe::Shard & shard,
  const datapipe::ExampleRecord & example, std::vector<autodiff::Tensor<float>> & storage);

Predictor model_predictor(const models::DrivingModel<float> & model);

// Throws ConfigError when the shard was prepared for another input size,
// window length or sequence layout.
void check_compatible(const models::ModelConfig & config, const datapipe::ShardHeader & header);

}  // namespace emvc::training

#endif  // EMVC__TRAINING__EVALUATE_HPP_
