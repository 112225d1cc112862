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

#ifndef EMVC__DATAPIPE__MANIFEST_HPP_
#define EMVC__DATAPIPE__MANIFEST_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emvc::datapipe
{

enum class Camera
{
  Center,
  Left,
  Right,
};

Camera parse_camera(std::string_view name);
std::string_view camera_name(Camera camera);

struct DrivingSample
{
  double timestamp_s = 0.0;
  std::string trip_id;
  Camera camera = Camera::Center;
  // Relative paths resolve against the manifest's directory.
  std::string image_path;
  // Steering-wheel degrees, positive = left turn.
  double steering_deg = 0.0;
  double speed_mps = 0.0;
};

inline constexpr std::string_view kManifestHeader =
  "timestamp_s,trip_id,camera,image_path,steering_deg,speed_mps";

// Parses manifest text. Throws FormatError naming the line for malformed rows
// and naming the trip for non-increasing timestamps within (trip, camera).
// Output is sorted by (trip, camera, timestamp).
std::vector<DrivingSample> parse_manifest(std::string_view text);
std::vector<DrivingSample> load_manifest(const std::filesystem::path & path);

// Rows are written in the given order with round-trippable numbers.
std::string format_manifest(const std::vector<DrivingSample> & samples);

}  // namespace emvc::datapipe

#endif  // EMVC__DATAPIPE__MANIFEST_HPP_
