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

#include "emvc/simworld/render.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "emvc/common/error.hpp"

namespace emvc::simworld
{

datapipe::Image render_frame(
  const Road & road, const SimState & state, double camera_offset_m, std::size_t side,
  const CameraParams & cam, const RenderStyle & style)
{
  if (side < 2) throw ValueError("render_frame: side must be >= 2");
  datapipe::Image img = datapipe::make_image(side, side);
  const double deg = std::numbers::pi / 180.0;
  const double focal = (static_cast<double>(side) / 2.0) / std::tan(cam.hfov_deg * deg / 2.0);
  const double sp = std::sin(cam.pitch_deg * deg), cp = std::cos(cam.pitch_deg * deg);
  const double ch = std::cos(state.heading_rad), sh = std::sin(state.heading_rad);
  // Camera position in world; offset is to the right of the heading.
  const double cx = state.x + cam.forward_m * ch + camera_offset_m * sh;
  const double cy = state.y + cam.forward_m * sh - camera_offset_m * ch;

  // Restrict nearest-point queries to the stretch that can be visible.
  const Projection here = road.project(state.x, state.y);
  const double s_min = here.s - 2.0 * cam.max_range_m;
  const double s_max = here.s + 2.0 * cam.max_range_m;
  std::vector<const Segment *> local;
  for (const auto & seg : road.segments())
    if (seg.s0 + seg.length >= s_min && seg.s0 <= s_max) local.push_back(&seg);

  const double hw = road.lane_half_width();
  auto put = [&](std::size_t r, std::size_t c, const std::array<float, 3> & col) {
    float * px = &img[(r * side + c) * 3];
    px[0] = col[0];
    px[1] = col[1];
    px[2] = col[2];
  };

  for (std::size_t r = 0; r < side; ++r) {
    const double v = (static_cast<double>(r) + 0.5 - static_cast<double>(side) / 2.0) / focal;
    // Ray in vehicle axes (forward, left, up): F + u R + v D.
    const double down = sp + v * cp;
    const double fwd = cp - v * sp;
    const double t = down > 0.0 ? cam.height_m / down : std::numeric_limits<double>::infinity();
    const double ground_x = t * fwd;
    const bool ground = down > 0.0 && ground_x <= cam.max_range_m;
    for (std::size_t c = 0; c < side; ++c) {
      if (!ground) {
        put(r, c, down > 0.0 ? style.grass : style.sky);
        continue;
      }
      const double u = (static_cast<double>(c) + 0.5 - static_cast<double>(side) / 2.0) / focal;
      const double gx = ground_x;
      const double gy = -t * u;
      const double wx = cx + gx * ch - gy * sh;
      const double wy = cy + gx * sh + gy * ch;
      Projection best;
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto * seg : local) {
        const Projection p = project_onto(*seg, wx, wy);
        if (std::abs(p.lateral) < best_d) {
          best_d = std::abs(p.lateral);
          best = p;
        }
      }
      const double d = best_d;
      if (d > hw + style.shoulder_m) {
        put(r, c, style.grass);
      } else if (std::abs(d - hw) <= style.edge_width_m / 2.0) {
        put(r, c, style.edge);
      } else if (d <= style.center_width_m / 2.0 &&
                 std::fmod(best.s, style.dash_period_m) < style.dash_length_m) {
        put(r, c, style.center);
      } else {
        put(r, c, style.asphalt);
      }
    }
  }
  return img;
}

}  // namespace emvc::simworld
