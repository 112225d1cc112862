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

#include "emvc/datapipe/shard.hpp"

#include <algorithm>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"

namespace emvc::datapipe
{

namespace
{

constexpr std::string_view kMagic = "EMVCSHRD";

void put_frame(ByteWriter & out, const FrameRecord & f)
{
  ByteWriter rec;
  rec.put_string(f.trip_id);
  rec.put_u8(static_cast<std::uint8_t>(f.camera));
  rec.put_f64(f.timestamp_s);
  rec.put_u32(static_cast<std::uint32_t>(f.pixels.size()));
  rec.put_bytes(std::string_view(reinterpret_cast<const char *>(f.pixels.data()), f.pixels.size()));
  out.put_string(rec.bytes());
}

void put_example(ByteWriter & out, const ExampleRecord & e)
{
  ByteWriter rec;
  rec.put_u32(e.frame);
  rec.put_u32(static_cast<std::uint32_t>(e.sequence.size()));
  for (auto i : e.sequence) rec.put_u32(i);
  rec.put_f64(e.steering_deg);
  rec.put_f64(e.speed_mps);
  rec.put_f64(e.next_speed_mps);
  rec.put_u8(static_cast<std::uint8_t>(command_index(e.command)));
  rec.put_u32(static_cast<std::uint32_t>(e.feedback_window.size()));
  for (double v : e.feedback_window) rec.put_f64(v);
  rec.put_u8(e.synthesized ? 1 : 0);
  out.put_string(rec.bytes());
}

}  // namespace

Image Shard::frame_image(std::size_t index) const
{
  const auto & f = frames.at(index);
  return from_bytes(header.input_side, header.input_side, f.pixels);
}

std::string encode_shard(const Shard & shard)
{
  ByteWriter out;
  out.put_bytes(kMagic);
  out.put_u32(kShardVersion);
  out.put_string(shard.header.config_text);
  out.put_u64(shard.header.config_hash);
  out.put_u32(shard.header.input_side);
  out.put_u32(shard.header.speed_window);
  out.put_u32(shard.header.sequence_length);
  out.put_u32(shard.header.sequence_stride);
  out.put_u32(static_cast<std::uint32_t>(shard.frames.size()));
  out.put_u32(static_cast<std::uint32_t>(shard.examples.size()));
  for (const auto & f : shard.frames) put_frame(out, f);
  for (const auto & e : shard.examples) put_example(out, e);
  return out.take();
}

Shard decode_shard(std::string_view bytes)
{
  ByteReader in(bytes);
  if (in.remaining() < kMagic.size() || in.get_bytes(kMagic.size()) != kMagic)
    throw FormatError("shard: bad magic");
  const auto version = in.get_u32();
  if (version != kShardVersion)
    throw FormatError("shard: unsupported version " + std::to_string(version));
  Shard s;
  s.header.config_text = in.get_string();
  s.header.config_hash = in.get_u64();
  s.header.input_side = in.get_u32();
  s.header.speed_window = in.get_u32();
  s.header.sequence_length = in.get_u32();
  s.header.sequence_stride = in.get_u32();
  const auto n_frames = in.get_u32();
  const auto n_examples = in.get_u32();
  const std::size_t frame_bytes =
    static_cast<std::size_t>(s.header.input_side) * s.header.input_side * 3;
  s.frames.reserve(std::min<std::size_t>(n_frames, in.remaining()));
  for (std::uint32_t i = 0; i < n_frames; ++i) {
    ByteReader rec(in.get_bytes(in.get_u32()));
    FrameRecord f;
    f.trip_id = rec.get_string();
    const auto cam = rec.get_u8();
    if (cam > 2) throw FormatError("shard: bad camera code in frame " + std::to_string(i));
    f.camera = static_cast<Camera>(cam);
    f.timestamp_s = rec.get_f64();
    const auto n = rec.get_u32();
    if (n != frame_bytes) throw FormatError("shard: frame " + std::to_string(i) + " has wrong size");
    const auto raw = rec.get_bytes(n);
    f.pixels.assign(raw.begin(), raw.end());
    if (!rec.at_end()) throw FormatError("shard: trailing bytes in frame record");
    s.frames.push_back(std::move(f));
  }
  s.examples.reserve(std::min<std::size_t>(n_examples, in.remaining()));
  for (std::uint32_t i = 0; i < n_examples; ++i) {
    ByteReader rec(in.get_bytes(in.get_u32()));
    ExampleRecord e;
    e.frame = rec.get_u32();
    const auto n_seq = rec.get_u32();
    if (n_seq > rec.remaining() / 4) throw FormatError("shard: bad sequence length");
    e.sequence.resize(n_seq);
    for (auto & v : e.sequence) v = rec.get_u32();
    e.steering_deg = rec.get_f64();
    e.speed_mps = rec.get_f64();
    e.next_speed_mps = rec.get_f64();
    const auto cmd = rec.get_u8();
    if (cmd >= kNumSpeedCommands) throw FormatError("shard: bad command code");
    e.command = command_from_index(cmd);
    const auto n_win = rec.get_u32();
    if (n_win > rec.remaining() / 8) throw FormatError("shard: bad window length");
    e.feedback_window.resize(n_win);
    for (auto & v : e.feedback_window) v = rec.get_f64();
    e.synthesized = rec.get_u8() != 0;
    if (!rec.at_end()) throw FormatError("shard: trailing bytes in example record");
    if (e.frame >= n_frames) throw FormatError("shard: example references missing frame");
    for (auto v : e.sequence)
      if (v >= n_frames) throw FormatError("shard: sequence references missing frame");
    s.examples.push_back(std::move(e));
  }
  if (!in.at_end()) throw FormatError("shard: trailing bytes");
  return s;
}

Shard read_shard(const std::filesystem::path & path)
{
  try {
    return decode_shard(read_file(path));
  } catch (const FormatError & e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_shard(const std::filesystem::path & path, const Shard & shard)
{
  write_file(path, encode_shard(shard));
}

}  // namespace emvc::datapipe
