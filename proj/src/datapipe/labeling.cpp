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

#include "emvc/datapipe/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "emvc/common/error.hpp"

namespace emvc::datapipe
{

SpeedCommand label_speed_command(double speed_s, double speed_e, double interval_s)
{
  if (!(interval_s > 0.0)) throw ValueError("label_speed_command: interval must be > 0");
  const double acce = (speed_e - speed_s) / interval_s;
  if (acce > kCommandThreshold) return SpeedCommand::Accelerate;
  if (acce < -kCommandThreshold) return SpeedCommand::Decelerate;
  return SpeedCommand::Maintain;
}

std::vector<std::optional<SpeedCommand>> label_stream(
  std::span<const double> timestamps, std::span<const double> speeds, double interval_s,
  double tolerance_s)
{
  if (timestamps.size() != speeds.size()) throw ShapeError("label_stream: length mismatch");
  if (!(interval_s > 0.0)) throw ValueError("label_stream: interval must be > 0");
  std::vector<std::optional<SpeedCommand>> out(timestamps.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double want = timestamps[i] + interval_s;
    // Timestamps increase, so the nearest index is monotone in i.
    j = std::max(j, i);
    while (j + 1 < timestamps.size() &&
           std::abs(timestamps[j + 1] - want) <= std::abs(timestamps[j] - want))
      ++j;
    if (std::abs(timestamps[j] - want) > tolerance_s) continue;
    out[i] = label_speed_command(speeds[i], speeds[j], interval_s);
  }
  return out;
}

double recovery_angle_deg(double speed_mps, double d_y_m, double t_r_s)
{
  return std::atan(d_y_m / (speed_mps * t_r_s)) * 180.0 / std::numbers::pi;
}

std::optional<double> synthesize_side_label(
  double theta_center_deg, double speed_mps, Camera side, double d_y_m, double t_r_s)
{
  if (side == Camera::Center) throw ValueError("synthesize_side_label: camera must be left or right");
  if (!(d_y_m > 0.0) || !(t_r_s > 0.0))
    throw ValueError("synthesize_side_label: d_y and t_r must be > 0");
  if (!(speed_mps >= kSynthesisMinSpeed)) return std::nullopt;
  const double delta = recovery_angle_deg(speed_mps, d_y_m, t_r_s);
  return side == Camera::Right ? theta_center_deg + delta : theta_center_deg - delta;
}

std::vector<DrivingSample> filter_low_speed(const std::vector<DrivingSample> & samples, double cutoff_mps)
{
  std::vector<DrivingSample> out;
  out.reserve(samples.size());
  for (const auto & s : samples)
    if (!(s.speed_mps < cutoff_mps)) out.push_back(s);
  return out;
}

SplitManifest split_by_trip(
  const std::vector<DrivingSample> & samples, std::array<double, 3> ratios, std::uint64_t seed)
{
  double total = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ValueError("split_by_trip: ratios must be >= 0");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValueError("split_by_trip: ratios must sum to 1");

  std::set<std::string> unique;
  for (const auto & s : samples) unique.insert(s.trip_id);
  std::vector<std::string> trips(unique.begin(), unique.end());
  const std::size_t n = trips.size();
  std::size_t wanted = 0;
  for (double r : ratios) wanted += r > 0.0 ? 1 : 0;
  if (n < wanted)
    throw ValueError(
      "split_by_trip: " + std::to_string(n) + " trips cannot fill " + std::to_string(wanted) +
      " splits");

  std::array<std::size_t, 3> count{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = ratios[k] * static_cast<double>(n);
    count[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[k] = exact - static_cast<double>(count[k]);
    assigned += count[k];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (rem[k] > rem[best]) best = k;
    ++count[best];
    rem[best] = -1.0;
    ++assigned;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (ratios[k] > 0.0 && count[k] == 0) {
      std::size_t donor = 0;
      for (std::size_t d = 1; d < 3; ++d)
        if (count[d] > count[donor]) donor = d;
      --count[donor];
      ++count[k];
    }
  }

  std::mt19937_64 rng(seed);
  std::shuffle(trips.begin(), trips.end(), rng);
  SplitManifest out;
  std::size_t pos = 0;
  for (auto * dst : {&out.train, &out.val, &out.test}) {
    const std::size_t k = dst == &out.train ? 0 : dst == &out.val ? 1 : 2;
    dst->assign(trips.begin() + static_cast<std::ptrdiff_t>(pos),
                trips.begin() + static_cast<std::ptrdiff_t>(pos + count[k]));
    std::sort(dst->begin(), dst->end());
    pos += count[k];
  }
  return out;
}

std::vector<double> build_feedback_window(std::span<const double> speeds, std::size_t index, std::size_t n)
{
  if (speeds.empty()) throw ValueError("build_feedback_window: empty stream");
  if (index >= speeds.size())
    throw ValueError("build_feedback_window: index " + std::to_string(index) + " outside stream");
  if (n == 0) throw ValueError("build_feedback_window: window length must be >= 1");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Position k holds the speed at index - n + k, clamped to the stream start.
    const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(index) - static_cast<std::ptrdiff_t>(n) +
                               static_cast<std::ptrdiff_t>(k);
    out[k] = speeds[static_cast<std::size_t>(std::max<std::ptrdiff_t>(src, 0))];
  }
  return out;
}

std::vector<double> synthesize_speed_noise(std::span<const double> window, std::mt19937_64 & rng, double sigma)
{
  if (!(sigma >= 0.0)) throw ValueError("synthesize_speed_noise: sigma must be >= 0");
  std::vector<double> out(window.begin(), window.end());
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto & v : out) v = std::max(0.0, v + noise(rng));
  return out;
}

}  // namespace emvc::datapipe
