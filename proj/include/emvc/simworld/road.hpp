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

#ifndef EMVC__SIMWORLD__ROAD_HPP_
#define EMVC__SIMWORLD__ROAD_HPP_

#include <cstdint>
#include <vector>

namespace emvc::simworld
{

struct RoadOptions
{
  double straight_min_m = 20.0;
  double straight_max_m = 80.0;
  double radius_min_m = 30.0;
  double radius_max_m = 200.0;
  double arc_min_m = 20.0;
  double arc_max_m = 80.0;
  // Turn per arc is capped at this many radians.
  double max_turn_rad = 1.5707963267948966;
  // With false, every segment is straight.
  bool curves = true;
  double lane_half_width_m = 1.5;
};

// A straight (curvature 0) or constant-curvature arc; curvature > 0 turns left.
struct Segment
{
  double s0 = 0.0;
  double length = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double heading0 = 0.0;
  double curvature = 0.0;
};

struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

struct Projection
{
  // Arc length of the nearest centerline point.
  double s = 0.0;
  // Signed distance, positive to the left of the direction of travel.
  double lateral = 0.0;
  double heading = 0.0;
  double curvature = 0.0;
};

class Road
{
public:
  Road(std::uint64_t seed, std::vector<Segment> segments, double lane_half_width_m);

  std::uint64_t seed() const { return seed_; }
  const std::vector<Segment> & segments() const { return segments_; }
  double length() const;
  double lane_half_width() const { return half_width_; }

  // Centerline pose at arc length s (clamped to the road).
  Pose2 pose_at(double s) const;
  double curvature_at(double s) const;

  // Nearest point over the whole road.
  Projection project(double x, double y) const;
  // Nearest point among segments overlapping [s_min, s_max].
  Projection project_window(double x, double y, double s_min, double s_max) const;

  std::size_t segment_index(double s) const;

private:
  std::uint64_t seed_;
  std::vector<Segment> segments_;
  double half_width_;
};

// Alternating straights and arcs (arc sign alternates), starting with a
// straight along +x from the origin, until `length_m` is covered.
Road gen_road(std::uint64_t seed, double length_m, const RoadOptions & options = {});

// Nearest-point projection onto a single segment.
Projection project_onto(const Segment & seg, double x, double y);

double wrap_angle(double a);

}  // namespace emvc::simworld

#endif  // EMVC__SIMWORLD__ROAD_HPP_
