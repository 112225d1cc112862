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

#ifndef EMVC__DATAPIPE__PREP_HPP_
#define EMVC__DATAPIPE__PREP_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emvc/datapipe/labeling.hpp"
#include "emvc/datapipe/manifest.hpp"
#include "emvc/datapipe/shard.hpp"

namespace emvc::datapipe
{

struct PrepConfig
{
  std::size_t input_side = 128;
  std::size_t speed_window = 10;
  std::size_t sequence_length = 5;
  std::size_t sequence_stride = 3;
  // Add left/right camera examples with recovery-adjusted labels.
  bool synthesis = true;
  double camera_offset_m = 0.508;
  double recovery_time_s = 1.0;
  double low_speed_cutoff_mps = kLowSpeedCutoff;
  double command_interval_s = 1.0;
  double timestamp_tolerance_s = 0.1;
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
  std::uint64_t split_seed = 1;
  // Keep every k-th center frame as an example.
  std::size_t sample_stride = 1;
};

struct PrepResult
{
  SplitManifest split;
  // train, val, test
  std::array<Shard, 3> shards;
  // Command counts over all examples, indexed by SpeedCommand.
  std::array<std::size_t, kNumSpeedCommands> histogram{};
  std::size_t skipped_unlabeled = 0;
  std::size_t skipped_low_speed = 0;
  std::size_t skipped_synthesis = 0;
};

// Runs labeling, filtering, synthesis and splitting over a parsed manifest.
// Images resolve against `image_root`; if any are missing, throws IoError
// listing up to the first 10. `config_text` and `config_hash` are echoed into
// every shard header.
PrepResult prepare_dataset(
  const std::vector<DrivingSample> & samples, const std::filesystem::path & image_root,
  const PrepConfig & config, const std::string & config_text, std::uint64_t config_hash);

// Loads, converts to HSV and squeezes one image.
Image preprocess_image(const Image & rgb, std::size_t side);

}  // namespace emvc::datapipe

#endif  // EMVC__DATAPIPE__PREP_HPP_
