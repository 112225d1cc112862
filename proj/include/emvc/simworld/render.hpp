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

#ifndef EMVC__SIMWORLD__RENDER_HPP_
#define EMVC__SIMWORLD__RENDER_HPP_

#include <array>

#include "emvc/datapipe/image.hpp"
#include "emvc/simworld/road.hpp"
#include "emvc/simworld/vehicle.hpp"

namespace emvc::simworld
{

struct CameraParams
{
  double height_m = 1.4;
  // Mount point ahead of the rear axle.
  double forward_m = 1.5;
  double pitch_deg = 12.0;
  double hfov_deg = 70.0;
  double max_range_m = 80.0;
};

struct RenderStyle
{
  std::array<float, 3> sky = {0.55f, 0.70f, 0.90f};
  std::array<float, 3> grass = {0.25f, 0.45f, 0.20f};
  std::array<float, 3> asphalt = {0.30f, 0.30f, 0.32f};
  std::array<float, 3> edge = {0.95f, 0.95f, 0.95f};
  std::array<float, 3> center = {0.95f, 0.80f, 0.15f};
  double edge_width_m = 0.15;
  double center_width_m = 0.15;
  double dash_period_m = 6.0;
  double dash_length_m = 3.0;
  // Asphalt extends this far beyond the edge lines.
  double shoulder_m = 0.5;
};

// RGB view from a forward camera shifted `camera_offset_m` to the right of the
// vehicle (negative = left). Flat ground, no anti-aliasing.
datapipe::Image render_frame(
  const Road & road, const SimState & state, double camera_offset_m, std::size_t side,
  const CameraParams & camera = {}, const RenderStyle & style = {});

}  // namespace emvc::simworld

#endif  // EMVC__SIMWORLD__RENDER_HPP_
