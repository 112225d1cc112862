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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "emvc/common/error.hpp"
#include "emvc/datapipe/manifest.hpp"
#include "emvc/simworld/dataset.hpp"
#include "emvc/simworld/episode.hpp"
#include "emvc/simworld/render.hpp"
#include "emvc/simworld/road.hpp"
#include "emvc/simworld/vehicle.hpp"

namespace
{

namespace sw = emvc::simworld;
namespace fs = std::filesystem;

sw::Road straight_road(double length = 500.0)
{
  sw::RoadOptions o;
  o.curves = false;
  return sw::gen_road(1, length, o);
}

TEST(Road, SameSeedSameGeometry)
{
  const auto a = sw::gen_road(17, 800.0);
  const auto b = sw::gen_road(17, 800.0);
  const auto c = sw::gen_road(18, 800.0);
  ASSERT_EQ(a.segments().size(), b.segments().size());
  for (std::size_t i = 0; i < a.segments().size(); ++i) {
    EXPECT_EQ(a.segments()[i].length, b.segments()[i].length);
    EXPECT_EQ(a.segments()[i].curvature, b.segments()[i].curvature);
  }
  EXPECT_NE(a.segments()[1].curvature, c.segments()[1].curvature);
  EXPECT_GE(a.length(), 800.0);
}

TEST(Road, StraightOnlyRunsAlongX)
{
  const auto r = straight_road();
  for (const auto & s : r.segments()) EXPECT_EQ(s.curvature, 0.0);
  for (double s = 0.0; s < r.length(); s += 37.0) {
    const auto p = r.pose_at(s);
    EXPECT_NEAR(p.x, s, 1e-9);
    EXPECT_EQ(p.y, 0.0);
    EXPECT_EQ(p.heading, 0.0);
  }
}

TEST(Road, ContinuousAndProjectable)
{
  const auto r = sw::gen_road(5, 1000.0);
  for (std::size_t i = 1; i < r.segments().size(); ++i) {
    const auto & seg = r.segments()[i];
    const auto before = r.pose_at(seg.s0 - 1e-9);
    EXPECT_NEAR(before.x, seg.x0, 1e-6);
    EXPECT_NEAR(before.y, seg.y0, 1e-6);
  }
  for (double s = 5.0; s < r.length() - 5.0; s += 13.0) {
    const auto p = r.pose_at(s);
    const double d = 0.7;
    const auto q = r.project(p.x - d * std::sin(p.heading), p.y + d * std::cos(p.heading));
    EXPECT_NEAR(q.s, s, 1e-6);
    EXPECT_NEAR(q.lateral, d, 1e-9);
  }
}

TEST(Vehicle, ZeroSteeringKeepsLine)
{
  sw::SimState s;
  s.speed_mps = 10.0;
  for (int i = 0; i < 300; ++i) s = sw::step_vehicle(s, 0.0, 10.0, sw::kDefaultDt);
  EXPECT_EQ(s.y, 0.0);
  EXPECT_NEAR(s.x, 100.0, 1e-9);
  EXPECT_NEAR(s.time_s, 10.0, 1e-9);
}

TEST(Vehicle, ConstantSteeringClosesCircle)
{
  const sw::VehicleParams vp;
  const double steering = 90.0;
  const double radius = vp.wheelbase_m / std::tan(steering / vp.steer_ratio * M_PI / 180.0);
  const int n = 1200;
  const double v = 2.0 * M_PI * radius / (n * sw::kDefaultDt);
  sw::SimState s;
  s.speed_mps = v;
  double max_dist = 0.0;
  for (int i = 0; i < n; ++i) {
    s = sw::step_vehicle(s, steering, v, sw::kDefaultDt, vp);
    max_dist = std::max(max_dist, std::hypot(s.x, s.y));
  }
  EXPECT_LT(std::hypot(s.x, s.y), 0.01 * 2.0 * M_PI * radius);
  EXPECT_NEAR(max_dist, 2.0 * radius, 0.01 * radius);
}

TEST(Vehicle, SpeedRateClamped)
{
  const sw::VehicleParams vp;
  sw::SimState s;
  s.speed_mps = 20.0;
  for (int i = 0; i < 30; ++i) {
    const auto next = sw::step_vehicle(s, 0.0, 0.0, sw::kDefaultDt, vp);
    EXPECT_GE(next.speed_mps, s.speed_mps - vp.a_max_mps2 * sw::kDefaultDt - 1e-12);
    EXPECT_LT(next.speed_mps, s.speed_mps);
    s = next;
  }
  EXPECT_NEAR(s.speed_mps, 18.0, 1e-9);
}

TEST(CrossTrack, SignConvention)
{
  const auto r = straight_road();
  sw::SimState s;
  s.x = 50.0;
  EXPECT_EQ(sw::cross_track_error(r, s), 0.0);
  s.y = 0.5;
  EXPECT_NEAR(sw::cross_track_error(r, s), 0.5, 1e-12);
  s.y = -0.25;
  EXPECT_NEAR(sw::cross_track_error(r, s), -0.25, 1e-12);
}

TEST(Render, CenteredOnStraightIsSymmetric)
{
  const auto r = straight_road();
  sw::SimState s;
  s.x = 20.0;
  const std::size_t n = 64;
  const auto img = sw::render_frame(r, s, 0.0, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t c = 0; c < 3; ++c) {
      double left = 0.0, right = 0.0;
      for (std::size_t x = 0; x < n / 2; ++x) {
        left += img[(y * n + x) * 3 + c];
        right += img[(y * n + (n - 1 - x)) * 3 + c];
      }
      EXPECT_LE(std::abs(left - right), 1.0) << "row " << y;
    }
}

TEST(Render, CameraOffsetMatchesVehicleOffset)
{
  // A camera 0.508 m left of a centered car sees what a centered camera sees
  // from a car displaced 0.508 m left.
  const auto r = straight_road();
  sw::SimState centered;
  centered.x = 30.0;
  auto shifted = centered;
  shifted.y = 0.508;
  const auto a = sw::render_frame(r, centered, -0.508, 48);
  const auto b = sw::render_frame(r, shifted, 0.0, 48);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += std::abs(a[i] - b[i]) > 1e-4f;
  EXPECT_LE(differ, a.size() / 200);
}

// Column centroid of the yellow center line in the lower half of the frame.
double marking_centroid(const emvc::datapipe::Image & img, std::size_t n)
{
  double sum = 0.0, count = 0.0;
  for (std::size_t y = n / 2; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t i = (y * n + x) * 3;
      if (img[i] > 0.8f && img[i + 2] < 0.5f) {  // yellow center line
        sum += static_cast<double>(x);
        count += 1.0;
      }
    }
  return sum / count;
}

TEST(Render, RightwardCameraShiftsMarkingsLeft)
{
  const auto r = straight_road();
  sw::SimState s;
  s.x = 10.0;
  const std::size_t n = 64;
  const double centered = marking_centroid(sw::render_frame(r, s, 0.0, n), n);
  const double shifted = marking_centroid(sw::render_frame(r, s, 0.5, n), n);
  EXPECT_NEAR(centered, (n - 1) / 2.0, 0.5);
  EXPECT_LT(shifted, centered - 1.0);
}

TEST(Render, OffRoadStillValid)
{
  const auto r = sw::gen_road(3, 400.0);
  sw::SimState s;
  s.x = 40.0;
  s.y = 25.0;
  const auto img = sw::render_frame(r, s, 0.0, 32);
  for (float v : img.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Episode, OracleStaysCentered)
{
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto road = sw::gen_road(seed, 1200.0);
    sw::OracleController oracle(road);
    sw::EpisodeOptions o;
    const auto rep = sw::run_episode(road, oracle, o);
    EXPECT_LT(rep.max_abs_cte, 0.05) << "seed " << seed;
    EXPECT_FALSE(rep.off_road);
    EXPECT_NEAR(rep.ticks.back().t, 60.0, 1e-9);
  }
}

TEST(Episode, ImpulseShiftsVehicleAndOracleRecovers)
{
  const auto road = sw::gen_road(4, 1200.0);
  sw::OracleController oracle(road);
  sw::EpisodeOptions o;
  o.duration_s = 20.0;
  o.perturbations = {sw::parse_perturbation("5:0.3")};
  const auto rep = sw::run_episode(road, oracle, o);
  const auto & at = rep.ticks[150];
  EXPECT_NEAR(at.t, 5.0, 1e-9);
  EXPECT_NEAR(at.cte, 0.3, 0.03);
  EXPECT_LT(std::abs(rep.ticks.back().cte), 0.05);
  EXPECT_EQ(rep.to_csv(), sw::run_episode(road, oracle, o).to_csv());
}

TEST(Episode, PerturbationParsing)
{
  const auto p = sw::parse_perturbation("12.5:-0.4");
  EXPECT_EQ(p.time_s, 12.5);
  EXPECT_EQ(p.lateral_m, -0.4);
  EXPECT_THROW(sw::parse_perturbation("5"), emvc::ConfigError);
  EXPECT_THROW(sw::parse_perturbation("-1:0.3"), emvc::ConfigError);
}

struct ConstantSteer : sw::Controller
{
  sw::DriveCommand act(const sw::Road &, const sw::SimState &, double) override { return {30.0, 10.0}; }
};

TEST(Episode, DriftingControllerFlaggedOffRoad)
{
  const auto road = straight_road(2000.0);
  ConstantSteer c;
  sw::EpisodeOptions o;
  const auto rep = sw::run_episode(road, c, o);
  EXPECT_TRUE(rep.off_road);
  ASSERT_TRUE(rep.off_road_time_s.has_value());
  EXPECT_LT(*rep.off_road_time_s, rep.ticks.back().t + 1e-9);
  EXPECT_LT(rep.ticks.back().t, 60.0);  // aborted well past the lane edge
}

std::string read_all(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Dataset, RowsPerCameraAndDeterminism)
{
  const auto a = fs::temp_directory_path() / "emvc_ds_a";
  const auto b = fs::temp_directory_path() / "emvc_ds_b";
  fs::remove_all(a);
  fs::remove_all(b);
  sw::DatasetOptions o;
  o.road_seeds = {2, 3};
  o.n_frames = 40;
  o.render_side = 16;
  const auto rows = sw::gen_dataset(o, a);
  EXPECT_EQ(rows.size(), 3u * 40u);
  sw::gen_dataset(o, b);
  EXPECT_EQ(read_all(a / "manifest.csv"), read_all(b / "manifest.csv"));
  std::size_t compared = 0;
  for (const auto & s : rows) {
    EXPECT_EQ(read_all(a / s.image_path), read_all(b / s.image_path));
    ++compared;
  }
  EXPECT_EQ(compared, 120u);
  EXPECT_EQ(emvc::datapipe::load_manifest(a / "manifest.csv").size(), 120u);

  o.n_frames = 0;
  fs::remove_all(a);
  EXPECT_TRUE(sw::gen_dataset(o, a).empty());
  EXPECT_EQ(read_all(a / "manifest.csv"), std::string(emvc::datapipe::kManifestHeader) + "\n");
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace
