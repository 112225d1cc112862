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

#include "emvc/training/evaluate.hpp"

#include <cmath>
#include <cstdio>

#include "emvc/common/error.hpp"

namespace emvc::training
{

std::string EvalMetrics::format() const
{
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf, "count=%zu discarded_low_speed=%zu angle_mae_deg=%.6f", count,
                discarded_low_speed, angle_mae_deg);
  out += buf;
  if (speed_mae_mps) {
    std::snprintf(buf, sizeof buf, " speed_mae_mps=%.6f", *speed_mae_mps);
    out += buf;
  }
  if (command_accuracy) {
    std::snprintf(buf, sizeof buf, " command_accuracy=%.6f", *command_accuracy);
    out += buf;
  }
  if (confusion) {
    out += "\nconfusion (rows = true, cols = predicted; accelerate decelerate maintain)";
    for (std::size_t t = 0; t < kNumSpeedCommands; ++t) {
      out += "\n  " + std::string(command_name(command_from_index(t))) + ":";
      for (std::size_t p = 0; p < kNumSpeedCommands; ++p) out += " " + std::to_string((*confusion)[t][p]);
    }
  }
  return out;
}

EvalMetrics evaluate(const datapipe::Shard & shard, const Predictor & predictor, double low_speed_cutoff_mps)
{
  EvalMetrics m;
  double angle_sum = 0.0, speed_sum = 0.0;
  std::size_t speed_n = 0, correct = 0, command_n = 0;
  std::array<std::array<std::size_t, kNumSpeedCommands>, kNumSpeedCommands> confusion{};
  for (const auto & e : shard.examples) {
    if (e.speed_mps < low_speed_cutoff_mps) {
      ++m.discarded_low_speed;
      continue;
    }
    const auto pred = predictor(shard, e);
    ++m.count;
    angle_sum += std::abs(pred.steering_deg - e.steering_deg);
    if (pred.speed_mps) {
      speed_sum += std::abs(*pred.speed_mps - e.next_speed_mps);
      ++speed_n;
    }
    if (const auto c = pred.command()) {
      ++command_n;
      correct += *c == e.command ? 1 : 0;
      ++confusion[command_index(e.command)][command_index(*c)];
    }
  }
  if (m.count > 0) m.angle_mae_deg = angle_sum / static_cast<double>(m.count);
  if (speed_n > 0) m.speed_mae_mps = speed_sum / static_cast<double>(speed_n);
  if (command_n > 0) {
    m.command_accuracy = static_cast<double>(correct) / static_cast<double>(command_n);
    m.confusion = confusion;
  }
  return m;
}

models::ModelInput<float> example_input(
  const models::DrivingModel<float> & model, const datapipe::Shard & shard,
  const datapipe::ExampleRecord & example, std::vector<autodiff::Tensor<float>> & storage)
{
  storage.clear();
  if (model.kind() == models::ModelKind::Command) {
    for (auto idx : example.sequence) storage.push_back(shard.frame_image(idx));
  } else {
    storage.push_back(shard.frame_image(example.frame));
  }
  models::ModelInput<float> in;
  for (const auto & t : storage) in.frames.push_back(&t);
  if (model.kind() == models::ModelKind::Mmmt) in.speed_window = example.feedback_window;
  return in;
}

Predictor model_predictor(const models::DrivingModel<float> & model)
{
  return [&model](const datapipe::Shard & shard, const datapipe::ExampleRecord & e) {
    std::vector<autodiff::Tensor<float>> storage;
    return model.predict(example_input(model, shard, e, storage));
  };
}

void check_compatible(const models::ModelConfig & c, const datapipe::ShardHeader & h)
{
  if (h.input_side != c.input_side)
    throw ConfigError(
      "shard input side " + std::to_string(h.input_side) + " does not match model input side " +
      std::to_string(c.input_side));
  if (c.kind == models::ModelKind::Mmmt && h.speed_window != c.speed_window)
    throw ConfigError(
      "shard feedback window " + std::to_string(h.speed_window) + " does not match model window " +
      std::to_string(c.speed_window));
  if (c.kind == models::ModelKind::Command &&
      (h.sequence_length != c.sequence_length || h.sequence_stride != c.sequence_stride))
    throw ConfigError("shard sequence layout does not match the command network config");
}

}  // namespace emvc::training
