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

#include "emvc/simworld/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emvc/common/error.hpp"

namespace emvc::simworld
{

namespace
{

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

SimState step_vehicle(
  const SimState & state, double steering_deg, double target_speed_mps, double dt_s,
  const VehicleParams & params)
{
  if (!(dt_s > 0.0)) throw ValueError("step_vehicle: dt must be > 0");
  if (!std::isfinite(steering_deg) || !std::isfinite(target_speed_mps))
    throw ValueError("step_vehicle: non-finite command");
  const double dv_max = params.a_max_mps2 * dt_s;
  const double target = std::max(target_speed_mps, 0.0);
  const double v1 = state.speed_mps + std::clamp(target - state.speed_mps, -dv_max, dv_max);
  const double dist = 0.5 * (state.speed_mps + v1) * dt_s;
  const double delta = steering_deg / params.steer_ratio * kDegToRad;
  const double kappa = std::tan(delta) / params.wheelbase_m;

  SimState next = state;
  const double h0 = state.heading_rad;
  if (std::abs(kappa * dist) < 1e-9) {
    next.x += dist * std::cos(h0);
    next.y += dist * std::sin(h0);
    next.heading_rad = h0 + kappa * dist;
  } else {
    const double h1 = h0 + kappa * dist;
    next.x += (std::sin(h1) - std::sin(h0)) / kappa;
    next.y -= (std::cos(h1) - std::cos(h0)) / kappa;
    next.heading_rad = h1;
  }
  next.speed_mps = v1;
  next.time_s = state.time_s + dt_s;
  return next;
}

double cross_track_error(const Road & road, const SimState & state)
{
  return road.project(state.x, state.y).lateral;
}

double steering_for_curvature(double kappa, const VehicleParams & params)
{
  return std::atan(kappa * params.wheelbase_m) / kDegToRad * params.steer_ratio;
}

OracleDriver::OracleDriver(const Road & road, OracleOptions options, VehicleParams vehicle)
    : road_(road), options_(options), vehicle_(vehicle)
{
}

double OracleDriver::curve_speed(double s) const
{
  const double k = std::abs(road_.curvature_at(s));
  if (k == 0.0) return options_.v_max_mps;
  return std::min(options_.v_max_mps, std::sqrt(options_.a_lat_max_mps2 / k));
}

double OracleDriver::target_speed(double s) const
{
  double v = curve_speed(s);
  // Brake early enough to reach each upcoming curve speed.
  const auto & segs = road_.segments();
  for (std::size_t i = road_.segment_index(s) + 1; i < segs.size(); ++i) {
    const double ahead = segs[i].s0 - s;
    if (ahead > options_.brake_horizon_m) break;
    const double vc = curve_speed(segs[i].s0 + 1e-9);
    v = std::min(v, std::sqrt(vc * vc + 2.0 * options_.brake_mps2 * ahead));
  }
  return v;
}

OracleCommand OracleDriver::command(const SimState & state, double s_hint, double dt_s) const
{
  const Projection p = road_.project_window(state.x, state.y, s_hint - 5.0, s_hint + 10.0);
  const double heading_err = wrap_angle(state.heading_rad - p.heading);
  // Pure pursuit toward a point `lookahead` ahead on the straightened path.
  const double ld = options_.lookahead_m;
  const double alpha = std::atan2(-p.lateral, ld) - heading_err;
  const double kappa_pp = 2.0 * std::sin(alpha) / ld;
  OracleCommand c;
  c.steering_deg = steering_for_curvature(p.curvature + kappa_pp, vehicle_);
  c.target_speed_mps = std::min(target_speed(p.s), state.speed_mps + options_.accel_mps2 * dt_s);
  return c;
}

}  // namespace emvc::simworld
