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

#ifndef EMVC__SIMWORLD__VEHICLE_HPP_
#define EMVC__SIMWORLD__VEHICLE_HPP_

#include "emvc/simworld/road.hpp"

namespace emvc::simworld
{

inline constexpr double kDefaultDt = 1.0 / 30.0;

// Rear-axle reference point.
struct SimState
{
  double x = 0.0;
  double y = 0.0;
  double heading_rad = 0.0;
  double speed_mps = 0.0;
  double time_s = 0.0;
};

struct VehicleParams
{
  double wheelbase_m = 2.7;
  // Steering-wheel degrees per road-wheel degree.
  double steer_ratio = 16.0;
  double a_max_mps2 = 2.0;
};

// Kinematic bicycle. Speed moves toward the target by at most a_max * dt; the
// step then follows an exact arc of curvature tan(delta) / L at the mean speed.
SimState step_vehicle(
  const SimState & state, double steering_deg, double target_speed_mps, double dt_s,
  const VehicleParams & params = {});

// Signed distance to the nearest centerline point, positive to the left.
double cross_track_error(const Road & road, const SimState & state);

// Steering-wheel degrees that produce curvature `kappa`.
double steering_for_curvature(double kappa, const VehicleParams & params = {});

struct OracleOptions
{
  double lookahead_m = 10.0;
  double v_max_mps = 15.0;
  double a_lat_max_mps2 = 2.0;
  // Planned braking rate ahead of curves and acceleration rate out of them.
  double brake_mps2 = 1.0;
  double accel_mps2 = 1.0;
  double brake_horizon_m = 120.0;
};

struct OracleCommand
{
  double steering_deg = 0.0;
  double target_speed_mps = 0.0;
};

// Curvature feedforward plus pure pursuit on the tracking error, and the
// curve speed law min(v_max, sqrt(a_lat * R)) with planned braking.
class OracleDriver
{
public:
  OracleDriver(const Road & road, OracleOptions options = {}, VehicleParams vehicle = {});

  // The speed target is capped at accel_mps2 * dt above the current speed.
  OracleCommand command(const SimState & state, double s_hint, double dt_s = kDefaultDt) const;
  double target_speed(double s) const;
  const OracleOptions & options() const { return options_; }

private:
  double curve_speed(double s) const;

  const Road & road_;
  OracleOptions options_;
  VehicleParams vehicle_;
};

}  // namespace emvc::simworld

#endif  // EMVC__SIMWORLD__VEHICLE_HPP_
