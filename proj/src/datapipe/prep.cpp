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

#include "emvc/datapipe/prep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <utility>

#include "emvc/common/error.hpp"

namespace emvc::datapipe
{

Image preprocess_image(const Image & rgb, std::size_t side)
{
  return rgb_to_hsv(squeeze_resize(rgb, side));
}

namespace
{

struct Stream
{
  std::string trip_id;
  Camera camera = Camera::Center;
  std::vector<const DrivingSample *> rows;
  std::vector<double> timestamps;
  std::vector<double> speeds;
};

// Frame reference: (stream id, row index).
using FrameRef = std::pair<std::size_t, std::size_t>;

struct PendingExample
{
  FrameRef frame;
  std::vector<FrameRef> sequence;
  ExampleRecord record;
};

std::optional<std::size_t> find_time(const Stream & s, double t, double tolerance)
{
  const auto it = std::lower_bound(s.timestamps.begin(), s.timestamps.end(), t - tolerance);
  std::optional<std::size_t> best;
  for (auto j = it; j != s.timestamps.end() && *j <= t + tolerance; ++j) {
    const auto idx = static_cast<std::size_t>(j - s.timestamps.begin());
    if (!best || std::abs(*j - t) < std::abs(s.timestamps[*best] - t)) best = idx;
  }
  return best;
}

}  // namespace

PrepResult prepare_dataset(
  const std::vector<DrivingSample> & samples, const std::filesystem::path & image_root,
  const PrepConfig & config, const std::string & config_text, std::uint64_t config_hash)
{
  if (config.input_side == 0 || config.speed_window == 0 || config.sequence_length == 0 ||
      config.sequence_stride == 0 || config.sample_stride == 0)
    throw ConfigError("prep: sizes and strides must be >= 1");

  auto resolve = [&](const DrivingSample & s) {
    const std::filesystem::path p(s.image_path);
    return p.is_absolute() ? p : image_root / p;
  };
  std::vector<std::string> missing;
  std::size_t n_missing = 0;
  for (const auto & s : samples) {
    if (std::filesystem::exists(resolve(s))) continue;
    if (missing.size() < 10) missing.push_back(resolve(s).string());
    ++n_missing;
  }
  if (n_missing > 0) {
    std::string msg = "prep: " + std::to_string(n_missing) + " missing images, first " +
      std::to_string(missing.size()) + ":";
    for (const auto & m : missing) msg += "\n  " + m;
    throw IoError(msg);
  }

  PrepResult result;
  result.split = split_by_trip(samples, config.split_ratios, config.split_seed);
  std::map<std::string, std::size_t> trip_split;
  for (const auto & t : result.split.train) trip_split[t] = 0;
  for (const auto & t : result.split.val) trip_split[t] = 1;
  for (const auto & t : result.split.test) trip_split[t] = 2;

  std::vector<Stream> streams;
  std::map<std::pair<std::string, Camera>, std::size_t> stream_of;
  for (const auto & s : samples) {
    const auto key = std::make_pair(s.trip_id, s.camera);
    auto it = stream_of.find(key);
    if (it == stream_of.end()) {
      it = stream_of.emplace(key, streams.size()).first;
      streams.push_back(Stream{s.trip_id, s.camera, {}, {}, {}});
    }
    auto & st = streams[it->second];
    st.rows.push_back(&s);
    st.timestamps.push_back(s.timestamp_s);
    st.speeds.push_back(s.speed_mps);
  }

  auto sequence_of = [&](std::size_t stream, std::size_t index) {
    std::vector<FrameRef> seq(config.sequence_length);
    for (std::size_t k = 0; k < config.sequence_length; ++k) {
      const std::size_t back = (config.sequence_length - 1 - k) * config.sequence_stride;
      seq[k] = {stream, index >= back ? index - back : 0};
    }
    return seq;
  };

  std::array<std::vector<PendingExample>, 3> pending;
  for (std::size_t sid = 0; sid < streams.size(); ++sid) {
    const auto & cs = streams[sid];
    if (cs.camera != Camera::Center) continue;
    const auto labels =
      label_stream(cs.timestamps, cs.speeds, config.command_interval_s, config.timestamp_tolerance_s);
    const std::size_t split = trip_split.at(cs.trip_id);
    for (std::size_t i = 0; i < cs.rows.size(); i += config.sample_stride) {
      if (!labels[i] || i + 1 >= cs.rows.size()) {
        ++result.skipped_unlabeled;
        continue;
      }
      const auto & row = *cs.rows[i];
      if (filter_low_speed({row}, config.low_speed_cutoff_mps).empty()) {
        ++result.skipped_low_speed;
        continue;
      }
      ExampleRecord base;
      base.steering_deg = row.steering_deg;
      base.speed_mps = row.speed_mps;
      base.next_speed_mps = cs.speeds[i + 1];
      base.command = *labels[i];
      base.feedback_window = build_feedback_window(cs.speeds, i, config.speed_window);
      pending[split].push_back(PendingExample{{sid, i}, sequence_of(sid, i), base});
      ++result.histogram[command_index(base.command)];

      if (!config.synthesis) continue;
      for (Camera side : {Camera::Left, Camera::Right}) {
        const auto it = stream_of.find({cs.trip_id, side});
        if (it == stream_of.end()) {
          ++result.skipped_synthesis;
          continue;
        }
        const auto & ss = streams[it->second];
        const auto j = find_time(ss, row.timestamp_s, config.timestamp_tolerance_s);
        const auto theta = synthesize_side_label(
          row.steering_deg, row.speed_mps, side, config.camera_offset_m, config.recovery_time_s);
        if (!j || !theta) {
          ++result.skipped_synthesis;
          continue;
        }
        ExampleRecord rec = base;
        rec.steering_deg = *theta;
        rec.synthesized = true;
        pending[split].push_back(PendingExample{{it->second, *j}, sequence_of(it->second, *j), rec});
        ++result.histogram[command_index(rec.command)];
      }
    }
  }

  // Index referenced frames per split in (stream, row) order.
  std::array<std::map<FrameRef, std::uint32_t>, 3> frame_ids;
  for (std::size_t k = 0; k < 3; ++k) {
    for (const auto & p : pending[k]) {
      frame_ids[k].emplace(p.frame, 0);
      for (const auto & r : p.sequence) frame_ids[k].emplace(r, 0);
    }
    std::uint32_t next = 0;
    for (auto & [ref, id] : frame_ids[k]) id = next++;
  }

  for (std::size_t k = 0; k < 3; ++k) {
    Shard & shard = result.shards[k];
    shard.header.config_text = config_text;
    shard.header.config_hash = config_hash;
    shard.header.input_side = static_cast<std::uint32_t>(config.input_side);
    shard.header.speed_window = static_cast<std::uint32_t>(config.speed_window);
    shard.header.sequence_length = static_cast<std::uint32_t>(config.sequence_length);
    shard.header.sequence_stride = static_cast<std::uint32_t>(config.sequence_stride);

    std::vector<FrameRef> refs;
    refs.reserve(frame_ids[k].size());
    for (const auto & [ref, id] : frame_ids[k]) refs.push_back(ref);
    shard.frames.resize(refs.size());
    std::vector<std::string> errors(refs.size());
    // Slots are preassigned, so the output order does not depend on threads.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(refs.size()); ++n) {
      const auto & row = *streams[refs[n].first].rows[refs[n].second];
      auto & f = shard.frames[n];
      f.trip_id = row.trip_id;
      f.camera = row.camera;
      f.timestamp_s = row.timestamp_s;
      try {
        f.pixels = to_bytes(preprocess_image(read_ppm(resolve(row)), config.input_side));
      } catch (const std::exception & e) {
        errors[n] = e.what();
      }
    }
    for (const auto & e : errors)
      if (!e.empty()) throw FormatError("prep: " + e);

    for (auto & p : pending[k]) {
      p.record.frame = frame_ids[k].at(p.frame);
      p.record.sequence.clear();
      for (const auto & r : p.sequence) p.record.sequence.push_back(frame_ids[k].at(r));
      shard.examples.push_back(std::move(p.record));
    }
  }
  return result;
}

}  // namespace emvc::datapipe
