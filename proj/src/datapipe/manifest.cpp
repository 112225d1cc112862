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

#include "emvc/datapipe/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"
#include "emvc/common/key_value.hpp"

namespace emvc::datapipe
{

Camera parse_camera(std::string_view name)
{
  if (name == "center") return Camera::Center;
  if (name == "left") return Camera::Left;
  if (name == "right") return Camera::Right;
  throw ValueError("unknown camera '" + std::string(name) + "' (expected center, left or right)");
}

std::string_view camera_name(Camera camera)
{
  switch (camera) {
    case Camera::Center: return "center";
    case Camera::Left: return "left";
    case Camera::Right: return "right";
  }
  return "?";
}

std::vector<DrivingSample> parse_manifest(std::string_view text)
{
  std::vector<DrivingSample> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != kManifestHeader)
        throw FormatError("manifest line " + std::to_string(line_no) + ": expected header '" +
                          std::string(kManifestHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    auto fail = [&](const std::string & msg) {
      return FormatError("manifest line " + std::to_string(line_no) + ": " + msg);
    };
    if (fields.size() != 6) throw fail("expected 6 fields, got " + std::to_string(fields.size()));
    DrivingSample s;
    try {
      s.timestamp_s = parse_double("timestamp_s", trim(fields[0]));
      s.trip_id = trim(fields[1]);
      s.camera = parse_camera(trim(fields[2]));
      s.image_path = trim(fields[3]);
      s.steering_deg = parse_double("steering_deg", trim(fields[4]));
      s.speed_mps = parse_double("speed_mps", trim(fields[5]));
    } catch (const Error & e) {
      throw fail(e.what());
    }
    if (s.trip_id.empty()) throw fail("empty trip_id");
    if (s.image_path.empty()) throw fail("empty image_path");
    if (!std::isfinite(s.timestamp_s) || !std::isfinite(s.steering_deg) || !std::isfinite(s.speed_mps))
      throw fail("non-finite value");
    if (s.speed_mps < 0.0) throw fail("negative speed");
    out.push_back(std::move(s));
  }
  if (!header_seen) throw FormatError("manifest: missing header");

  // Validate order within each (trip, camera) stream as recorded, then sort.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(out[a].trip_id, out[a].camera) < std::tie(out[b].trip_id, out[b].camera);
  });
  std::vector<DrivingSample> sorted;
  sorted.reserve(out.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto & s = out[order[k]];
    if (!sorted.empty() && sorted.back().trip_id == s.trip_id && sorted.back().camera == s.camera &&
        !(s.timestamp_s > sorted.back().timestamp_s))
      throw FormatError(
        "manifest: timestamps not strictly increasing in trip '" + s.trip_id + "' camera " +
        std::string(camera_name(s.camera)) + " at t=" + std::to_string(s.timestamp_s));
    sorted.push_back(s);
  }
  return sorted;
}

std::vector<DrivingSample> load_manifest(const std::filesystem::path & path)
{
  return parse_manifest(read_file(path));
}

std::string format_manifest(const std::vector<DrivingSample> & samples)
{
  std::string out(kManifestHeader);
  out += '\n';
  char buf[96];
  for (const auto & s : samples) {
    std::snprintf(buf, sizeof buf, "%.6f", s.timestamp_s);
    out += buf;
    out += ',' + s.trip_id + ',' + std::string(camera_name(s.camera)) + ',' + s.image_path + ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.steering_deg, s.speed_mps);
    out += buf;
  }
  return out;
}

}  // namespace emvc::datapipe
