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

#ifndef EMVC__SIMWORLD__DATASET_HPP_
#define EMVC__SIMWORLD__DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "emvc/datapipe/manifest.hpp"
#include "emvc/simworld/render.hpp"
#include "emvc/simworld/road.hpp"
#include "emvc/simworld/vehicle.hpp"

namespace emvc::simworld
{

struct DatasetOptions
{
  // One trip per road seed.
  std::vector<std::uint64_t> road_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Total frames per camera, spread evenly over the trips.
  std::size_t n_frames = 3000;
  std::size_t render_side = 128;
  double camera_offset_m = 0.508;
  double dt_s = kDefaultDt;
  RoadOptions road;
  OracleOptions oracle;
  VehicleParams vehicle;
  CameraParams camera;
};

// Frames per trip in road_seeds order.
std::vector<std::size_t> frames_per_trip(const DatasetOptions & options);

// Drives every road with the oracle and writes center/left/right PPM frames
// under `out_dir/images/` plus `out_dir/manifest.csv`. Returns the manifest
// rows in file order.
std::vector<datapipe::DrivingSample> gen_dataset(
  const DatasetOptions & options, const std::filesystem::path & out_dir);

// Road long enough for `n_frames` ticks at the oracle's top speed.
Road road_for_frames(std::uint64_t seed, std::size_t n_frames, const DatasetOptions & options);

}  // namespace emvc::simworld

#endif  // EMVC__SIMWORLD__DATASET_HPP_
