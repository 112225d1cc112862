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

#include "emvc/simworld/dataset.hpp"

#include <cstdio>
#include <string>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"
#include "emvc/datapipe/image.hpp"
#include "emvc/simworld/episode.hpp"

namespace emvc::simworld
{

std::vector<std::size_t> frames_per_trip(const DatasetOptions & o)
{
  if (o.road_seeds.empty()) throw ConfigError("dataset needs at least one road seed");
  std::vector<std::size_t> out(o.road_seeds.size(), o.n_frames / o.road_seeds.size());
  for (std::size_t i = 0; i < o.n_frames % o.road_seeds.size(); ++i) ++out[i];
  return out;
}

Road road_for_frames(std::uint64_t seed, std::size_t n_frames, const DatasetOptions & o)
{
  const double span = static_cast<double>(n_frames) * o.dt_s * o.oracle.v_max_mps;
  return gen_road(seed, span + 2.0 * o.camera.max_range_m + 50.0, o.road);
}

std::vector<datapipe::DrivingSample> gen_dataset(const DatasetOptions & o, const std::filesystem::path & out_dir)
{
  using datapipe::Camera;
  const auto counts = frames_per_trip(o);
  std::vector<std::vector<datapipe::DrivingSample>> per_trip(o.road_seeds.size());
  std::vector<std::string> errors(o.road_seeds.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(o.road_seeds.size()); ++ti) {
    try {
      const std::uint64_t seed = o.road_seeds[ti];
      const std::string trip = "trip" + std::to_string(seed);
      const Road road = road_for_frames(seed, counts[ti], o);
      OracleController oracle(road, o.oracle, o.vehicle);
      const Pose2 start = road.pose_at(0.0);
      SimState state;
      state.x = start.x;
      state.y = start.y;
      state.heading_rad = start.heading;
      state.speed_mps = OracleDriver(road, o.oracle, o.vehicle).target_speed(0.0);
      double s_hint = 0.0;
      auto & rows = per_trip[ti];
      for (std::size_t k = 0; k < counts[ti]; ++k) {
        state.time_s = static_cast<double>(k) * o.dt_s;
        s_hint = road.project_window(state.x, state.y, s_hint - 10.0, s_hint + 20.0).s;
        const DriveCommand cmd = oracle.act(road, state, s_hint);
        for (Camera cam : {Camera::Center, Camera::Left, Camera::Right}) {
          const double offset = cam == Camera::Center ? 0.0
                                : cam == Camera::Left ? -o.camera_offset_m
                                                      : o.camera_offset_m;
          char name[64];
          std::snprintf(name, sizeof name, "%s_%06zu.ppm", std::string(datapipe::camera_name(cam)).c_str(), k);
          const std::string rel = "images/" + trip + "/" + name;
          datapipe::write_ppm(out_dir / rel, render_frame(road, state, offset, o.render_side, o.camera));
          datapipe::DrivingSample row;
          row.timestamp_s = state.time_s;
          row.trip_id = trip;
          row.camera = cam;
          row.image_path = rel;
          row.steering_deg = cmd.steering_deg;
          row.speed_mps = state.speed_mps;
          rows.push_back(std::move(row));
        }
        state = step_vehicle(state, cmd.steering_deg, cmd.target_speed_mps, o.dt_s, o.vehicle);
      }
    } catch (const std::exception & e) {
      errors[ti] = e.what();
    }
  }
  for (const auto & e : errors)
    if (!e.empty()) throw IoError("datagen: " + e);

  std::vector<datapipe::DrivingSample> all;
  for (auto & rows : per_trip) all.insert(all.end(), rows.begin(), rows.end());
  write_file(out_dir / "manifest.csv", datapipe::format_manifest(all));
  return all;
}

}  // namespace emvc::simworld
