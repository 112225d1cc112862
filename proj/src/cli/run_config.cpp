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

#include "emvc/cli/run_config.hpp"

#include <algorithm>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"

namespace emvc::cli
{

const std::vector<ConfigKey> & config_keys()
{
  static const std::vector<ConfigKey> keys = {
    {"model.kind", "mmmt", "base | command | mmmt"},
    {"model.input_side", "128", "square network input side (pixels)"},
    {"model.conv", "11/4/24,5/2/36,3/2/48,3/1/64,3/1/64", "conv layers as kernel/stride/channels"},
    {"model.fc", "512,128,32", "hidden fully connected widths"},
    {"model.lstm_hidden", "64", "command net LSTM width"},
    {"model.sequence_length", "5", "command net frames per input"},
    {"model.sequence_stride", "3", "stream frames between sequence frames"},
    {"model.speed_window", "10", "feedback speeds fed to mmmt"},
    {"model.speed_encoder", "32,32", "speed encoder widths"},
    {"model.speed_head_hidden", "32", "mmmt speed head hidden width"},
    {"model.angle_scale_deg", "30", "steering head output scale (deg)"},
    {"model.speed_scale_mps", "30", "speed head output and window scale (m/s)"},
    {"model.task_weight", "auto", "lambda; auto = 1.0 mmmt, 0.5 command"},
    {"model.angle_weight_beta_deg", "5", "sample weight min(1 + |theta|/beta, cap)"},
    {"model.angle_weight_cap", "4", "sample weight cap"},
    {"data.out_dir", "data", "datagen output directory"},
    {"data.road_seeds", "1-10", "one trip per road seed"},
    {"data.n_frames", "3000", "frames per camera over all trips"},
    {"data.render_side", "128", "rendered frame side (pixels)"},
    {"data.camera_offset_m", "0.508", "side camera lateral offset d_y"},
    {"road.lane_half_width_m", "1.5", "lane half-width; off-road threshold"},
    {"road.straight_min_m", "20", ""},
    {"road.straight_max_m", "80", ""},
    {"road.radius_min_m", "30", ""},
    {"road.radius_max_m", "200", ""},
    {"road.arc_min_m", "20", ""},
    {"road.arc_max_m", "80", ""},
    {"road.curves", "true", "false gives straight roads only"},
    {"oracle.lookahead_m", "10", "pure pursuit lookahead"},
    {"oracle.v_max_mps", "15", "oracle top speed"},
    {"oracle.a_lat_max_mps2", "2", "curve speed law lateral acceleration"},
    {"oracle.brake_mps2", "1", "planned deceleration before curves"},
    {"oracle.accel_mps2", "1", "planned acceleration"},
    {"camera.height_m", "1.4", ""},
    {"camera.forward_m", "1.5", "camera ahead of the rear axle"},
    {"camera.pitch_deg", "12", ""},
    {"camera.hfov_deg", "70", ""},
    {"camera.max_range_m", "80", ""},
    {"vehicle.wheelbase_m", "2.7", ""},
    {"vehicle.steer_ratio", "16", "steering-wheel deg per road-wheel deg"},
    {"vehicle.a_max_mps2", "2", ""},
    {"prep.manifest", "data/manifest.csv", "input manifest"},
    {"prep.out_dir", "shards", "shard output directory"},
    {"prep.synthesis", "true", "add side-camera recovery examples"},
    {"prep.recovery_time_s", "1", "recovery time t_r"},
    {"prep.low_speed_cutoff_mps", "4", "examples slower than this are dropped"},
    {"prep.command_interval_s", "1", "speed command interval"},
    {"prep.timestamp_tolerance_s", "0.1", "nearest-timestamp tolerance"},
    {"prep.split", "0.8,0.1,0.1", "train,val,test trip ratios"},
    {"prep.split_seed", "1", ""},
    {"prep.sample_stride", "1", "keep every k-th center frame"},
    {"train.data_dir", "shards", "directory with train/val shards"},
    {"train.out_dir", "run", "checkpoint and log directory"},
    {"train.epochs", "10", ""},
    {"train.batch_size", "16", ""},
    {"train.max_steps", "0", "0 = no cap"},
    {"train.optimizer", "adam", "adam | sgd"},
    {"train.lr", "0.001", ""},
    {"train.lr_final_fraction", "1", "cosine decay target as a fraction of lr"},
    {"train.seed", "1", "model init, shuffling and augmentation"},
    {"train.augment", "true", "random flip and rotation"},
    {"train.flip_probability", "0.5", ""},
    {"train.max_rotation_deg", "2", ""},
    {"train.speed_noise_sigma", "0.2", "feedback window noise (m/s)"},
    {"train.train_eval_limit", "0", "train examples scored per epoch; 0 = all"},
    {"eval.checkpoint", "run/best.ckpt", ""},
    {"eval.shard", "shards/test.shard", ""},
    {"eval.out_dir", "eval", ""},
    {"control.alpha", "0.2", "steering smoothing factor"},
    {"control.deadband_deg", "0.1", "steering deadband"},
    {"control.v_max_mps", "30", "target speed clamp"},
    {"drive.checkpoint", "run/best.ckpt", ""},
    {"drive.out_dir", "drive", ""},
    {"drive.road_seed", "1001", ""},
    {"drive.duration_s", "60", ""},
    {"drive.perturb", "", "time:offset[,time:offset...]"},
    {"drive.oracle", "false", "drive with the oracle instead of a model"},
    {"gradcheck.tolerance", "1e-3", ""},
    {"gradcheck.samples_per_tensor", "6", ""},
    {"gradcheck.seed", "1", ""},
  };
  return keys;
}

RunConfig::RunConfig()
{
  for (const auto & k : config_keys()) kv_.set(k.name, k.default_value);
}

void RunConfig::set(const std::string & key, const std::string & value)
{
  if (!kv_.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  kv_.set(key, value);
}

void RunConfig::apply_override(const std::string & assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must be key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig RunConfig::parse(std::string_view text)
{
  RunConfig rc;
  KeyValueText kv;
  try {
    kv = KeyValueText::parse(text);
  } catch (const Error & e) {
    throw ConfigError(e.what());
  }
  for (const auto & [k, v] : kv.entries()) rc.set(k, v);
  return rc;
}

RunConfig RunConfig::load(const std::filesystem::path & path)
{
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError & e) {
    throw ConfigError(e.what());
  }
  return parse(text);
}

std::size_t RunConfig::get_size(const std::string & key) const
{
  const long long v = get_int(key);
  if (v < 0) throw ConfigError(key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

std::string RunConfig::section_text(const std::vector<std::string> & prefixes) const
{
  KeyValueText out;
  for (const auto & [k, v] : kv_.entries())
    for (const auto & p : prefixes)
      if (k.rfind(p, 0) == 0) out.set(k, v);
  return out.serialize();
}

std::vector<std::uint64_t> parse_seed_list(const std::string & key, const std::string & text)
{
  std::vector<std::uint64_t> out;
  for (const auto & item : split(text, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const auto dash = t.find('-');
    if (dash == std::string::npos) {
      const long long v = parse_int(key, t);
      if (v < 0) throw ConfigError(key + ": seeds must be >= 0");
      out.push_back(static_cast<std::uint64_t>(v));
    } else {
      const long long a = parse_int(key, trim(t.substr(0, dash)));
      const long long b = parse_int(key, trim(t.substr(dash + 1)));
      if (a < 0 || b < a) throw ConfigError(key + ": bad range '" + t + "'");
      for (long long v = a; v <= b; ++v) out.push_back(static_cast<std::uint64_t>(v));
    }
  }
  return out;
}

models::ModelConfig RunConfig::model_config() const
{
  KeyValueText kv;
  for (const auto & [k, v] : kv_.entries())
    if (k.rfind("model.", 0) == 0 && !(k == "model.task_weight" && v == "auto")) kv.set(k, v);
  try {
    return models::ModelConfig::from_text(kv);
  } catch (const ValueError & e) {
    throw ConfigError(e.what());
  }
}

simworld::RoadOptions RunConfig::road_options() const
{
  simworld::RoadOptions r;
  r.lane_half_width_m = get_double("road.lane_half_width_m");
  r.straight_min_m = get_double("road.straight_min_m");
  r.straight_max_m = get_double("road.straight_max_m");
  r.radius_min_m = get_double("road.radius_min_m");
  r.radius_max_m = get_double("road.radius_max_m");
  r.arc_min_m = get_double("road.arc_min_m");
  r.arc_max_m = get_double("road.arc_max_m");
  r.curves = get_bool("road.curves");
  if (!(r.lane_half_width_m > 0.0) || !(r.straight_min_m > 0.0) || r.straight_max_m < r.straight_min_m ||
      !(r.radius_min_m > 0.0) || r.radius_max_m < r.radius_min_m || !(r.arc_min_m > 0.0) ||
      r.arc_max_m < r.arc_min_m)
    throw ConfigError("road.* ranges must be positive with min <= max");
  return r;
}

simworld::OracleOptions RunConfig::oracle_options() const
{
  simworld::OracleOptions o;
  o.lookahead_m = get_double("oracle.lookahead_m");
  o.v_max_mps = get_double("oracle.v_max_mps");
  o.a_lat_max_mps2 = get_double("oracle.a_lat_max_mps2");
  o.brake_mps2 = get_double("oracle.brake_mps2");
  o.accel_mps2 = get_double("oracle.accel_mps2");
  if (!(o.lookahead_m > 0.0) || !(o.v_max_mps > 0.0) || !(o.a_lat_max_mps2 > 0.0) ||
      !(o.brake_mps2 > 0.0) || !(o.accel_mps2 > 0.0))
    throw ConfigError("oracle.* values must be > 0");
  return o;
}

simworld::CameraParams RunConfig::camera_params() const
{
  simworld::CameraParams c;
  c.height_m = get_double("camera.height_m");
  c.forward_m = get_double("camera.forward_m");
  c.pitch_deg = get_double("camera.pitch_deg");
  c.hfov_deg = get_double("camera.hfov_deg");
  c.max_range_m = get_double("camera.max_range_m");
  if (!(c.height_m > 0.0) || !(c.hfov_deg > 0.0 && c.hfov_deg < 180.0) || !(c.max_range_m > 0.0))
    throw ConfigError("camera.* values out of range");
  return c;
}

simworld::DatasetOptions RunConfig::dataset_options() const
{
  simworld::DatasetOptions d;
  d.road_seeds = parse_seed_list("data.road_seeds", get("data.road_seeds"));
  if (d.road_seeds.empty()) throw ConfigError("data.road_seeds is empty");
  d.n_frames = get_size("data.n_frames");
  d.render_side = get_size("data.render_side");
  if (d.render_side < 2) throw ConfigError("data.render_side must be >= 2");
  d.camera_offset_m = get_double("data.camera_offset_m");
  d.road = road_options();
  d.oracle = oracle_options();
  d.camera = camera_params();
  d.vehicle.wheelbase_m = get_double("vehicle.wheelbase_m");
  d.vehicle.steer_ratio = get_double("vehicle.steer_ratio");
  d.vehicle.a_max_mps2 = get_double("vehicle.a_max_mps2");
  if (!(d.vehicle.wheelbase_m > 0.0) || !(d.vehicle.steer_ratio > 0.0) || !(d.vehicle.a_max_mps2 > 0.0))
    throw ConfigError("vehicle.* values must be > 0");
  return d;
}

datapipe::PrepConfig RunConfig::prep_config() const
{
  const auto m = model_config();
  datapipe::PrepConfig p;
  p.input_side = m.input_side;
  p.speed_window = m.speed_window;
  p.sequence_length = m.sequence_length;
  p.sequence_stride = m.sequence_stride;
  p.synthesis = get_bool("prep.synthesis");
  p.camera_offset_m = get_double("data.camera_offset_m");
  p.recovery_time_s = get_double("prep.recovery_time_s");
  p.low_speed_cutoff_mps = get_double("prep.low_speed_cutoff_mps");
  p.command_interval_s = get_double("prep.command_interval_s");
  p.timestamp_tolerance_s = get_double("prep.timestamp_tolerance_s");
  const auto parts = split(get("prep.split"), ',');
  if (parts.size() != 3) throw ConfigError("prep.split needs three ratios");
  for (std::size_t i = 0; i < 3; ++i) p.split_ratios[i] = parse_double("prep.split", trim(parts[i]));
  p.split_seed = static_cast<std::uint64_t>(get_size("prep.split_seed"));
  p.sample_stride = get_size("prep.sample_stride");
  if (p.sample_stride == 0) throw ConfigError("prep.sample_stride must be >= 1");
  if (!(p.camera_offset_m > 0.0) || !(p.recovery_time_s > 0.0) || !(p.command_interval_s > 0.0))
    throw ConfigError("prep offsets and intervals must be > 0");
  return p;
}

training::TrainOptions RunConfig::train_options() const
{
  training::TrainOptions t;
  t.epochs = get_size("train.epochs");
  t.batch_size = get_size("train.batch_size");
  t.max_steps = get_size("train.max_steps");
  t.optimizer.kind = autodiff::parse_optimizer_kind(get("train.optimizer"));
  t.optimizer.learning_rate = get_double("train.lr");
  t.lr_final_fraction = get_double("train.lr_final_fraction");
  t.seed = static_cast<std::uint64_t>(get_size("train.seed"));
  t.augment = get_bool("train.augment");
  t.augment_options.flip_probability = get_double("train.flip_probability");
  t.augment_options.max_rotation_deg = get_double("train.max_rotation_deg");
  t.speed_noise_sigma = get_double("train.speed_noise_sigma");
  t.train_eval_limit = get_size("train.train_eval_limit");
  t.low_speed_cutoff_mps = get_double("prep.low_speed_cutoff_mps");
  if (t.batch_size == 0) throw ConfigError("train.batch_size must be >= 1");
  if (!(t.optimizer.learning_rate > 0.0)) throw ConfigError("train.lr must be > 0");
  if (!(t.speed_noise_sigma >= 0.0)) throw ConfigError("train.speed_noise_sigma must be >= 0");
  return t;
}

simworld::EpisodeOptions RunConfig::episode_options() const
{
  simworld::EpisodeOptions e;
  e.duration_s = get_double("drive.duration_s");
  if (!(e.duration_s >= 0.0)) throw ConfigError("drive.duration_s must be >= 0");
  for (const auto & item : split(get("drive.perturb"), ','))
    if (!trim(item).empty()) e.perturbations.push_back(simworld::parse_perturbation(trim(item)));
  const auto d = dataset_options();
  e.vehicle = d.vehicle;
  return e;
}

simworld::ModelControllerOptions RunConfig::controller_options() const
{
  simworld::ModelControllerOptions c;
  c.render_side = get_size("data.render_side");
  c.camera = camera_params();
  c.smoother.alpha = get_double("control.alpha");
  c.smoother.deadband_deg = get_double("control.deadband_deg");
  c.control.v_max_mps = get_double("control.v_max_mps");
  if (!(c.smoother.alpha > 0.0 && c.smoother.alpha <= 1.0)) throw ConfigError("control.alpha must be in (0, 1]");
  if (!(c.smoother.deadband_deg >= 0.0)) throw ConfigError("control.deadband_deg must be >= 0");
  if (!(c.control.v_max_mps > 0.0)) throw ConfigError("control.v_max_mps must be > 0");
  return c;
}

}  // namespace emvc::cli
