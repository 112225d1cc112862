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

#ifndef EMVC__SIMWORLD__EPISODE_HPP_
#define EMVC__SIMWORLD__EPISODE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emvc/control/control.hpp"
#include "emvc/models/driving_model.hpp"
#include "emvc/simworld/render.hpp"
#include "emvc/simworld/road.hpp"
#include "emvc/simworld/vehicle.hpp"

namespace emvc::simworld
{

struct DriveCommand
{
  double steering_deg = 0.0;
  double target_speed_mps = 0.0;
};

class Controller
{
public:
  virtual ~Controller() = default;
  // Called once per tick before the vehicle moves; `s_hint` is the arc length
  // of the vehicle's current projection.
  virtual DriveCommand act(const Road & road, const SimState & state, double s_hint) = 0;
};

class OracleController : public Controller
{
public:
  OracleController(const Road & road, OracleOptions options = {}, VehicleParams vehicle = {});
  DriveCommand act(const Road & road, const SimState & state, double s_hint) override;

private:
  OracleDriver driver_;
};

struct ModelControllerOptions
{
  std::size_t render_side = 128;
  CameraParams camera;
  control::SmootherState smoother;
  control::ControllerOptions control;
};

// Renders the center camera, preprocesses it like the training pipeline and
// runs controller_step on an mmmt model.
class ModelController : public Controller
{
public:
  ModelController(
    const models::DrivingModel<float> & model, double initial_speed_mps, ModelControllerOptions options = {});
  DriveCommand act(const Road & road, const SimState & state, double s_hint) override;

private:
  const models::DrivingModel<float> & model_;
  ModelControllerOptions options_;
  control::FeedbackWindow window_;
  control::SmootherState smoother_;
};

struct Perturbation
{
  double time_s = 0.0;
  // Instantaneous lateral shift, positive to the left.
  double lateral_m = 0.0;
};

// Parses "t:offset" (e.g. "5:0.3").
Perturbation parse_perturbation(const std::string & text);

struct EpisodeOptions
{
  double duration_s = 60.0;
  double dt_s = kDefaultDt;
  std::vector<Perturbation> perturbations;
  // Start speed; unset uses the oracle speed law at s = 0.
  std::optional<double> initial_speed_mps;
  VehicleParams vehicle;
  // Stop early once |cte| exceeds this multiple of the lane half-width.
  double abort_factor = 4.0;
};

struct EpisodeTick
{
  double t = 0.0;
  double cte = 0.0;
  double heading_err = 0.0;
  double speed = 0.0;
  double steering = 0.0;
};

struct EpisodeReport
{
  std::vector<EpisodeTick> ticks;
  double max_abs_cte = 0.0;
  double mean_abs_cte = 0.0;
  bool off_road = false;
  std::optional<double> off_road_time_s;
  double lane_half_width = 0.0;

  std::string to_csv() const;
  std::string summary() const;
};

EpisodeReport run_episode(const Road & road, Controller & controller, const EpisodeOptions & options);

}  // namespace emvc::simworld

#endif  // EMVC__SIMWORLD__EPISODE_HPP_
