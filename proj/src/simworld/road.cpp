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

#include "emvc/simworld/road.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "emvc/common/error.hpp"

namespace emvc::simworld
{

double wrap_angle(double a)
{
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

namespace
{

Pose2 segment_pose(const Segment & seg, double u)
{
  const double k = seg.curvature;
  Pose2 p;
  p.heading = seg.heading0 + k * u;
  if (k == 0.0) {
    p.x = seg.x0 + u * std::cos(seg.heading0);
    p.y = seg.y0 + u * std::sin(seg.heading0);
  } else {
    p.x = seg.x0 + (std::sin(p.heading) - std::sin(seg.heading0)) / k;
    p.y = seg.y0 - (std::cos(p.heading) - std::cos(seg.heading0)) / k;
  }
  return p;
}

}  // namespace

Projection project_onto(const Segment & seg, double x, double y)
{
  Projection out;
  out.curvature = seg.curvature;
  double u = 0.0;
  if (seg.curvature == 0.0) {
    const double c = std::cos(seg.heading0), s = std::sin(seg.heading0);
    u = std::clamp((x - seg.x0) * c + (y - seg.y0) * s, 0.0, seg.length);
  } else {
    const double r = 1.0 / seg.curvature;
    // Circle center lies to the left for positive curvature.
    const double cx = seg.x0 - r * std::sin(seg.heading0);
    const double cy = seg.y0 + r * std::cos(seg.heading0);
    const double dx = x - cx, dy = y - cy;
    if (dx == 0.0 && dy == 0.0) {
      u = 0.0;
    } else {
      // Angle from the center to the segment start, and to the query point.
      const double a0 = std::atan2(seg.y0 - cy, seg.x0 - cx);
      const double aq = std::atan2(dy, dx);
      const double sweep = wrap_angle(aq - a0) * (seg.curvature > 0.0 ? 1.0 : -1.0);
      u = sweep * std::abs(r);
      if (u < 0.0 || u > seg.length) {
        // Outside the arc span: the nearer endpoint wins.
        const Pose2 a = segment_pose(seg, 0.0);
        const Pose2 b = segment_pose(seg, seg.length);
        const double da = std::hypot(x - a.x, y - a.y);
        const double db = std::hypot(x - b.x, y - b.y);
        u = da <= db ? 0.0 : seg.length;
      }
    }
  }
  const Pose2 p = segment_pose(seg, u);
  out.s = seg.s0 + u;
  out.heading = p.heading;
  out.lateral = -(x - p.x) * std::sin(p.heading) + (y - p.y) * std::cos(p.heading);
  // Endpoint clamps leave a longitudinal component; use the true distance sign.
  const double dist = std::hypot(x - p.x, y - p.y);
  out.lateral = out.lateral >= 0.0 ? dist : -dist;
  return out;
}

Road::Road(std::uint64_t seed, std::vector<Segment> segments, double lane_half_width_m)
    : seed_(seed), segments_(std::move(segments)), half_width_(lane_half_width_m)
{
  if (segments_.empty()) throw ValueError("road needs at least one segment");
  if (!(half_width_ > 0.0)) throw ValueError("lane half-width must be > 0");
}

double Road::length() const { return segments_.back().s0 + segments_.back().length; }

std::size_t Road::segment_index(double s) const
{
  const auto it = std::upper_bound(
    segments_.begin(), segments_.end(), s, [](double v, const Segment & seg) { return v < seg.s0; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

Pose2 Road::pose_at(double s) const
{
  s = std::clamp(s, 0.0, length());
  const auto & seg = segments_[segment_index(s)];
  return segment_pose(seg, std::min(s - seg.s0, seg.length));
}

double Road::curvature_at(double s) const
{
  return segments_[segment_index(std::clamp(s, 0.0, length()))].curvature;
}

Projection Road::project(double x, double y) const
{
  return project_window(x, y, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

Projection Road::project_window(double x, double y, double s_min, double s_max) const
{
  Projection best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto & seg : segments_) {
    if (seg.s0 + seg.length < s_min || seg.s0 > s_max) continue;
    const Projection p = project_onto(seg, x, y);
    const double d = std::abs(p.lateral);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  if (!std::isfinite(best_d)) return project(x, y);
  return best;
}

Road gen_road(std::uint64_t seed, double length_m, const RoadOptions & o)
{
  if (!(length_m > 0.0)) throw ValueError("gen_road: length must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Segment> segs;
  double s = 0.0, x = 0.0, y = 0.0, h = 0.0;
  double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
  bool straight = true;
  while (s < length_m) {
    Segment seg;
    seg.s0 = s;
    seg.x0 = x;
    seg.y0 = y;
    seg.heading0 = h;
    if (straight || !o.curves) {
      seg.length = between(o.straight_min_m, o.straight_max_m);
      seg.curvature = 0.0;
    } else {
      const double radius = between(o.radius_min_m, o.radius_max_m);
      seg.length = std::min(between(o.arc_min_m, o.arc_max_m), o.max_turn_rad * radius);
      seg.curvature = sign / radius;
      sign = -sign;
    }
    const Pose2 end = segment_pose(seg, seg.length);
    x = end.x;
    y = end.y;
    h = end.heading;
    s += seg.length;
    segs.push_back(seg);
    straight = !straight;
  }
  return Road(seed, std::move(segs), o.lane_half_width_m);
}

}  // namespace emvc::simworld
