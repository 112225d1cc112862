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

#include "emvc/control/control.hpp"

#include <algorithm>
#include <cmath>

#include "emvc/common/error.hpp"

namespace emvc::control
{

double smooth(SmootherState & state, double theta_deg)
{
  if (!std::isfinite(theta_deg)) throw ValueError("smooth: non-finite steering input");
  if (!(state.alpha > 0.0 && state.alpha <= 1.0)) throw ValueError("smooth: alpha must be in (0, 1]");
  if (!(state.deadband_deg >= 0.0)) throw ValueError("smooth: deadband must be >= 0");
  if (!state.last_output_deg) {
    state.last_output_deg = theta_deg;
    return theta_deg;
  }
  const double prev = *state.last_output_deg;
  if (std::abs(theta_deg - prev) < state.deadband_deg) return prev;
  const double out = state.alpha * theta_deg + (1.0 - state.alpha) * prev;
  state.last_output_deg = out;
  return out;
}

double command_to_setpoint(SpeedCommand command, double current_speed_mps)
{
  if (!(current_speed_mps >= 0.0)) throw ValueError("command_to_setpoint: speed must be >= 0");
  switch (command) {
    case SpeedCommand::Accelerate: return current_speed_mps + kCommandStepMps;
    case SpeedCommand::Decelerate: return std::max(current_speed_mps - kCommandStepMps, 0.0);
    case SpeedCommand::Maintain: return current_speed_mps;
  }
  return current_speed_mps;
}

FeedbackWindow::FeedbackWindow(std::size_t length, double initial_speed)
{
  if (length == 0) throw ValueError("feedback window length must be >= 1");
  values_.assign(length, std::max(initial_speed, 0.0));
}

void FeedbackWindow::push(double speed_mps)
{
  values_.pop_front();
  values_.push_back(speed_mps);
}

ControlOutput controller_step(
  const models::DrivingModel<float> & model, const datapipe::Image & frame,
  FeedbackWindow & window, SmootherState & smoother, const ControllerOptions & options)
{
  if (model.kind() != models::ModelKind::Mmmt)
    throw ValueError("controller_step needs an mmmt model");
  models::ModelInput<float> input;
  input.frames = {&frame};
  input.speed_window = window.values();
  const auto pred = model.predict(input);
  ControlOutput out;
  out.raw_steering_deg = pred.steering_deg;
  out.steering_deg = smooth(smoother, pred.steering_deg);
  out.target_speed_mps = std::clamp(pred.speed_mps.value_or(0.0), 0.0, options.v_max_mps);
  window.push(out.target_speed_mps);
  return out;
}

}  // namespace emvc::control
