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

#ifndef EMVC__DATAPIPE__LABELING_HPP_
#define EMVC__DATAPIPE__LABELING_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "emvc/common/speed_command.hpp"
#include "emvc/datapipe/manifest.hpp"

namespace emvc::datapipe
{

inline constexpr double kCommandThreshold = 0.25;
inline constexpr double kLowSpeedCutoff = 4.0;
inline constexpr double kSynthesisMinSpeed = 1.0;

// acce = (speed_e - speed_s) / interval; strictly above +0.25 accelerates,
// strictly below -0.25 decelerates.
SpeedCommand label_speed_command(double speed_s, double speed_e, double interval_s);

// Labels every index of one stream from the speed `interval_s` later, taken at
// the nearest timestamp. Entries are empty when that timestamp is more than
// `tolerance_s` away. The nominal interval is the divisor. Timestamps must be
// strictly increasing.
std::vector<std::optional<SpeedCommand>> label_stream(
  std::span<const double> timestamps, std::span<const double> speeds, double interval_s = 1.0,
  double tolerance_s = 0.1);

// Recovery angle in degrees: atan(d_y / (speed * t_r)).
double recovery_angle_deg(double speed_mps, double d_y_m, double t_r_s);

// Side-camera label; empty below kSynthesisMinSpeed. Throws ValueError for the
// center camera or non-positive d_y / t_r.
std::optional<double> synthesize_side_label(
  double theta_center_deg, double speed_mps, Camera side, double d_y_m = 0.508,
  double t_r_s = 1.0);

// Keeps samples with speed >= cutoff.
std::vector<DrivingSample> filter_low_speed(
  const std::vector<DrivingSample> & samples, double cutoff_mps = kLowSpeedCutoff);

struct SplitManifest
{
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

// Trip-atomic split. Counts follow the ratios by largest remainder; every split
// with a positive ratio gets at least one trip.
SplitManifest split_by_trip(
  const std::vector<DrivingSample> & samples, std::array<double, 3> ratios, std::uint64_t seed);

// The n speeds strictly before `index`, oldest first, left-padded with the
// earliest speed of the stream.
std::vector<double> build_feedback_window(std::span<const double> speeds, std::size_t index, std::size_t n = 10);

// Adds N(0, sigma) to each entry and clamps at zero.
std::vector<double> synthesize_speed_noise(
  std::span<const double> window, std::mt19937_64 & rng, double sigma = 0.2);

}  // namespace emvc::datapipe

#endif  // EMVC__DATAPIPE__LABELING_HPP_
