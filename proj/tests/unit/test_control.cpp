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
#include <limits>
#include <random>
#include <vector>

#include "emvc/common/error.hpp"
#include "emvc/control/control.hpp"
#include "emvc/datapipe/image.hpp"
#include "emvc/models/driving_model.hpp"

namespace
{

using emvc::SpeedCommand;
using emvc::control::FeedbackWindow;
using emvc::control::smooth;
using emvc::control::SmootherState;
using emvc::models::DrivingModel;
using emvc::models::ModelConfig;
using emvc::models::ModelKind;

SmootherState plain(double alpha)
{
  SmootherState s;
  s.alpha = alpha;
  s.deadband_deg = 0.0;
  return s;
}

TEST(Smooth, HandSequence)
{
  auto s = plain(0.2);
  s.last_output_deg = 0.0;
  EXPECT_DOUBLE_EQ(smooth(s, 10.0), 2.0);
  EXPECT_DOUBLE_EQ(smooth(s, 10.0), 3.6);
  EXPECT_DOUBLE_EQ(smooth(s, -4.0), 2.08);
  EXPECT_DOUBLE_EQ(smooth(s, 0.0), 1.664);
}

TEST(Smooth, FirstCallPassesThrough)
{
  auto s = plain(0.2);
  EXPECT_EQ(smooth(s, 7.5), 7.5);
}

TEST(Smooth, AlphaOneIsIdentity)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 20.0);
  auto s = plain(1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = n(rng);
    EXPECT_EQ(smooth(s, x), x);
  }
}

TEST(Smooth, GeometricConvergence)
{
  auto s = plain(0.3);
  s.last_output_deg = -4.0;
  const double c = 6.0;
  for (int t = 1; t <= 40; ++t) {
    const double y = smooth(s, c);
    EXPECT_NEAR(std::abs(y - c), std::pow(0.7, t) * 10.0, 1e-12);
  }
}

TEST(Smooth, DeadbandHoldsOutput)
{
  SmootherState s;
  s.last_output_deg = 1.0;
  EXPECT_EQ(smooth(s, 1.05), 1.0);
  EXPECT_EQ(smooth(s, 0.95), 1.0);
  EXPECT_DOUBLE_EQ(smooth(s, 2.0), 1.2);
}

TEST(Smooth, ReducesTotalVariation)
{
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int stream = 0; stream < 1000; ++stream) {
    SmootherState s;
    double tv_in = 0.0, tv_out = 0.0, prev_in = 0.0, prev_out = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = n(rng);
      const double y = smooth(s, x);
      if (i > 0) {
        tv_in += std::abs(x - prev_in);
        tv_out += std::abs(y - prev_out);
      }
      prev_in = x;
      prev_out = y;
    }
    EXPECT_LE(tv_out, tv_in);
  }
}

TEST(Smooth, RejectsBadInput)
{
  SmootherState s;
  EXPECT_THROW(smooth(s, std::numeric_limits<double>::quiet_NaN()), emvc::ValueError);
  s.alpha = 0.0;
  EXPECT_THROW(smooth(s, 1.0), emvc::ValueError);
}

TEST(Setpoint, FixedLevels)
{
  using emvc::control::command_to_setpoint;
  EXPECT_EQ(command_to_setpoint(SpeedCommand::Maintain, 10.0), 10.0);
  EXPECT_EQ(command_to_setpoint(SpeedCommand::Decelerate, 0.5), 0.0);
  EXPECT_EQ(command_to_setpoint(SpeedCommand::Accelerate, 10.0), 11.0);
}

TEST(FeedbackWindowTest, RollsOldestOut)
{
  FeedbackWindow w(3, 5.0);
  EXPECT_EQ(w.values(), (std::vector<double>{5, 5, 5}));
  w.push(6.0);
  w.push(7.0);
  w.push(8.0);
  w.push(9.0);
  EXPECT_EQ(w.values(), (std::vector<double>{7, 8, 9}));
}

emvc::datapipe::Image frame_for(const ModelConfig & c, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  auto img = emvc::datapipe::make_image(c.input_side, c.input_side);
  for (auto & v : img.data()) v = u(rng);
  return img;
}

TEST(ControllerStep, BypassedSmootherGivesRawOutput)
{
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Mmmt), 5);
  const auto frame = frame_for(m.config(), 1);
  FeedbackWindow w(m.config().speed_window, 8.0);
  auto s = plain(1.0);
  for (int i = 0; i < 5; ++i) {
    const auto out = emvc::control::controller_step(m, frame, w, s);
    EXPECT_EQ(out.steering_deg, out.raw_steering_deg);
  }
}

TEST(ControllerStep, ConvergesOnConstantScene)
{
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Mmmt), 6);
  const auto frame = frame_for(m.config(), 2);
  FeedbackWindow w(m.config().speed_window, 8.0);
  SmootherState s;
  emvc::control::ControlOutput prev{}, out{};
  for (int i = 0; i < 300; ++i) {
    prev = out;
    out = emvc::control::controller_step(m, frame, w, s);
  }
  EXPECT_NEAR(out.steering_deg, prev.steering_deg, 1e-9);
  EXPECT_NEAR(out.target_speed_mps, prev.target_speed_mps, 1e-6);
  EXPECT_NEAR(out.steering_deg, out.raw_steering_deg, 0.1);
  EXPECT_EQ(w.values().back(), out.target_speed_mps);
}

TEST(ControllerStep, TargetSpeedClamped)
{
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Mmmt), 7);
  auto & bias = m.parameters().at("speed_out.b");
  const auto frame = frame_for(m.config(), 3);
  SmootherState s;
  bias[0] = 5.0f;  // scaled by 30 m/s: far above v_max
  FeedbackWindow w(m.config().speed_window, 8.0);
  for (int i = 0; i < 20; ++i)
    EXPECT_EQ(emvc::control::controller_step(m, frame, w, s).target_speed_mps, 30.0);
  bias[0] = -5.0f;
  EXPECT_EQ(emvc::control::controller_step(m, frame, w, s).target_speed_mps, 0.0);
}

TEST(ControllerStep, NeedsMmmt)
{
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Base), 8);
  FeedbackWindow w(4, 8.0);
  SmootherState s;
  EXPECT_THROW(emvc::control::controller_step(m, frame_for(m.config(), 4), w, s), emvc::ValueError);
}

}  // namespace
