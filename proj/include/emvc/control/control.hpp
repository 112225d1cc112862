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

#ifndef EMVC__CONTROL__CONTROL_HPP_
#define EMVC__CONTROL__CONTROL_HPP_

#include <deque>
#include <optional>
#include <vector>

#include "emvc/common/speed_command.hpp"
#include "emvc/datapipe/image.hpp"
#include "emvc/models/driving_model.hpp"

namespace emvc::control
{

struct SmootherState
{
  double alpha = 0.2;
  double deadband_deg = 0.1;
  std::optional<double> last_output_deg;
};

// Single exponential smoothing with a deadband. The first call passes the
// input through; afterwards changes smaller than the deadband hold the
// previous output.
double smooth(SmootherState & state, double theta_deg);

inline constexpr double kCommandStepMps = 1.0;

double command_to_setpoint(SpeedCommand command, double current_speed_mps);

struct ControlOutput
{
  double steering_deg = 0.0;
  double target_speed_mps = 0.0;
  double raw_steering_deg = 0.0;
};

// Rolling feedback-speed window, oldest first.
class FeedbackWindow
{
public:
  // Filled with `initial_speed`.
  FeedbackWindow(std::size_t length, double initial_speed);
  void push(double speed_mps);
  std::vector<double> values() const { return {values_.begin(), values_.end()}; }
  std::size_t size() const { return values_.size(); }

private:
  std::deque<double> values_;
};

struct ControllerOptions
{
  double v_max_mps = 30.0;
};

// One closed-loop tick for an mmmt model: predict on `frame` (already
// preprocessed to the model input), smooth the steering, clamp the predicted
// speed to [0, v_max] and push it onto the feedback window.
ControlOutput controller_step(
  const models::DrivingModel<float> & model, const datapipe::Image & frame,
  FeedbackWindow & window, SmootherState & smoother, const ControllerOptions & options = {});

}  // namespace emvc::control

#endif  // EMVC__CONTROL__CONTROL_HPP_
