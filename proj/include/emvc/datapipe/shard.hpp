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

#ifndef EMVC__DATAPIPE__SHARD_HPP_
#define EMVC__DATAPIPE__SHARD_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emvc/common/speed_command.hpp"
#include "emvc/datapipe/image.hpp"
#include "emvc/datapipe/manifest.hpp"

namespace emvc::datapipe
{

inline constexpr std::uint32_t kShardVersion = 1;

struct ShardHeader
{
  // Resolved preprocessing config and its FNV-1a hash.
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint32_t input_side = 0;
  std::uint32_t speed_window = 0;
  std::uint32_t sequence_length = 0;
  std::uint32_t sequence_stride = 0;
};

// One preprocessed frame: HSV, squeezed to input_side, quantized to 8 bits.
struct FrameRecord
{
  std::string trip_id;
  Camera camera = Camera::Center;
  double timestamp_s = 0.0;
  std::vector<std::uint8_t> pixels;
};

struct ExampleRecord
{
  std::uint32_t frame = 0;
  // Frame indices of the input sequence, oldest first, ending at `frame`.
  std::vector<std::uint32_t> sequence;
  // Label (side cameras already corrected).
  double steering_deg = 0.0;
  double speed_mps = 0.0;
  double next_speed_mps = 0.0;
  SpeedCommand command = SpeedCommand::Maintain;
  std::vector<double> feedback_window;
  bool synthesized = false;
};

struct Shard
{
  ShardHeader header;
  std::vector<FrameRecord> frames;
  std::vector<ExampleRecord> examples;

  Image frame_image(std::size_t index) const;
};

// Layout: magic "EMVCSHRD", u32 version, header fields, u32 frame count,
// u32 example count, then one u32-length-prefixed record per frame and per
// example. All numbers little-endian.
std::string encode_shard(const Shard & shard);
Shard decode_shard(std::string_view bytes);
Shard read_shard(const std::filesystem::path & path);
void write_shard(const std::filesystem::path & path, const Shard & shard);

}  // namespace emvc::datapipe

#endif  // EMVC__DATAPIPE__SHARD_HPP_
