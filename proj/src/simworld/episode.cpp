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

#include "emvc/simworld/episode.hpp"

#include <cmath>
#include <cstdio>

#include "emvc/common/error.hpp"
#include "emvc/common/key_value.hpp"
#include "emvc/datapipe/prep.hpp"

namespace emvc::simworld
{

OracleController::OracleController(const Road & road, OracleOptions options, VehicleParams vehicle)
    : driver_(road, options, vehicle)
{
}

DriveCommand OracleController::act(const Road &, const SimState & state, double s_hint)
{
  const auto c = driver_.command(state, s_hint);
  return DriveCommand{c.steering_deg, c.target_speed_mps};
}

ModelController::ModelController(
  const models::DrivingModel<float> & model, double initial_speed_mps, ModelControllerOptions options)
    : model_(model),
      options_(options),
      window_(model.config().speed_window, initial_speed_mps),
      smoother_(options.smoother)
{
  if (model.kind() != models::ModelKind::Mmmt)
    throw ValueError("closed-loop driving needs an mmmt model");
}

DriveCommand ModelController::act(const Road & road, const SimState & state, double)
{
  const auto rgb = render_frame(road, state, 0.0, options_.render_side, options_.camera);
  const auto frame = datapipe::preprocess_image(rgb, model_.config().input_side);
  const auto out = control::controller_step(model_, frame, window_, smoother_, options_.control);
  return DriveCommand{out.steering_deg, out.target_speed_mps};
}

Perturbation parse_perturbation(const std::string & text)
{
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("perturbation '" + text + "' must be time:offset");
  Perturbation p;
  p.time_s = parse_double("perturb time", trim(parts[0]));
  p.lateral_m = parse_double("perturb offset", trim(parts[1]));
  if (p.time_s < 0.0) throw ConfigError("perturbation time must be >= 0");
  return p;
}

EpisodeReport run_episode(const Road & road, Controller & controller, const EpisodeOptions & o)
{
  if (!(o.dt_s > 0.0) || !(o.duration_s >= 0.0)) throw ValueError("run_episode: bad duration or dt");
  const Pose2 start = road.pose_at(0.0);
  SimState state;
  state.x = start.x;
  state.y = start.y;
  state.heading_rad = start.heading;
  state.speed_mps = o.initial_speed_mps ? *o.initial_speed_mps : OracleDriver(road).target_speed(0.0);

  EpisodeReport report;
  report.lane_half_width = road.lane_half_width();
  std::vector<bool> applied(o.perturbations.size(), false);
  double s_hint = 0.0;
  double sum_abs = 0.0;
  const auto n_ticks = static_cast<std::size_t>(std::llround(o.duration_s / o.dt_s));
  for (std::size_t k = 0; k <= n_ticks; ++k) {
    state.time_s = static_cast<double>(k) * o.dt_s;
    for (std::size_t i = 0; i < o.perturbations.size(); ++i) {
      if (!applied[i] && state.time_s + 1e-9 >= o.perturbations[i].time_s) {
        applied[i] = true;
        state.x -= o.perturbations[i].lateral_m * std::sin(state.heading_rad);
        state.y += o.perturbations[i].lateral_m * std::cos(state.heading_rad);
      }
    }
    const Projection p = road.project_window(state.x, state.y, s_hint - 10.0, s_hint + 20.0);
    s_hint = p.s;
    const DriveCommand cmd = controller.act(road, state, s_hint);

    EpisodeTick tick;
    tick.t = state.time_s;
    tick.cte = p.lateral;
    tick.heading_err = wrap_angle(state.heading_rad - p.heading);
    tick.speed = state.speed_mps;
    tick.steering = cmd.steering_deg;
    report.ticks.push_back(tick);
    const double a = std::abs(p.lateral);
    sum_abs += a;
    report.max_abs_cte = std::max(report.max_abs_cte, a);
    if (a > road.lane_half_width() && !report.off_road_time_s) report.off_road_time_s = state.time_s;
    if (a > o.abort_factor * road.lane_half_width()) break;
    if (p.s >= road.length() - 1.0) break;
    if (k < n_ticks) state = step_vehicle(state, cmd.steering_deg, cmd.target_speed_mps, o.dt_s, o.vehicle);
  }
  report.mean_abs_cte = report.ticks.empty() ? 0.0 : sum_abs / static_cast<double>(report.ticks.size());
  report.off_road = report.max_abs_cte > road.lane_half_width();
  return report;
}

std::string EpisodeReport::to_csv() const
{
  std::string out = "t,cte,heading_err,speed,steering\n";
  char buf[160];
  for (const auto & k : ticks) {
    std::snprintf(buf, sizeof buf, "%.6f,%.9f,%.9f,%.9f,%.9f\n", k.t, k.cte, k.heading_err, k.speed, k.steering);
    out += buf;
  }
  return out;
}

std::string EpisodeReport::summary() const
{
  char buf[200];
  std::snprintf(
    buf, sizeof buf, "max_abs_cte=%.4f mean_abs_cte=%.4f off_road=%s off_road_time=%s",
    max_abs_cte, mean_abs_cte, off_road ? "true" : "false",
    off_road_time_s ? std::to_string(*off_road_time_s).c_str() : "none");
  return buf;
}

}  // namespace emvc::simworld
