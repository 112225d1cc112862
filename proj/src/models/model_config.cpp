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

#include "emvc/models/model_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emvc/common/error.hpp"

namespace emvc::models
{

ModelKind parse_model_kind(const std::string & name)
{
  if (name == "base") return ModelKind::Base;
  if (name == "command") return ModelKind::Command;
  if (name == "mmmt") return ModelKind::Mmmt;
  throw ConfigError("unknown model kind '" + name + "' (expected base, command or mmmt)");
}

std::string model_kind_name(ModelKind kind)
{
  switch (kind) {
    case ModelKind::Base: return "base";
    case ModelKind::Command: return "command";
    case ModelKind::Mmmt: return "mmmt";
  }
  return "?";
}

ModelConfig ModelConfig::defaults(ModelKind kind)
{
  ModelConfig c;
  c.kind = kind;
  c.task_weight = kind == ModelKind::Command ? 0.5 : 1.0;
  return c;
}

ModelConfig ModelConfig::toy(ModelKind kind)
{
  ModelConfig c = defaults(kind);
  c.input_side = 16;
  c.conv = {{3, 1, 4}, {3, 2, 5}, {3, 1, 6}, {2, 1, 6}};
  c.fc = {12, 8, 6};
  c.lstm_hidden = 5;
  c.sequence_length = 3;
  c.sequence_stride = 1;
  c.speed_window = 4;
  c.speed_encoder = {6, 5};
  c.speed_head_hidden = 4;
  return c;
}

void ModelConfig::validate() const
{
  if (input_side == 0) throw ConfigError("input_side must be positive");
  if (conv.empty()) throw ConfigError("conv stack must not be empty");
  if (fc.empty()) throw ConfigError("fc widths must not be empty");
  if (kind == ModelKind::Command && fc.size() < 2)
    throw ConfigError("command network needs at least two fc widths (pre- and post-lstm)");
  for (std::size_t w : fc)
    if (w == 0) throw ConfigError("fc widths must be positive");
  for (std::size_t w : speed_encoder)
    if (w == 0) throw ConfigError("speed_encoder widths must be positive");
  if (speed_window < 1) throw ConfigError("speed_window must be >= 1");
  if (lstm_hidden < 1) throw ConfigError("lstm_hidden must be >= 1");
  if (sequence_length < 1) throw ConfigError("sequence_length must be >= 1");
  if (sequence_stride < 1) throw ConfigError("sequence_stride must be >= 1");
  if (speed_head_hidden < 1) throw ConfigError("speed_head_hidden must be >= 1");
  if (!(task_weight >= 0.0) || !std::isfinite(task_weight))
    throw ConfigError("task_weight must be finite and >= 0");
  if (!(angle_weight_beta_deg > 0.0)) throw ConfigError("angle_weight_beta_deg must be > 0");
  if (!(angle_weight_cap >= 1.0)) throw ConfigError("angle_weight_cap must be >= 1");
  if (!(angle_scale_deg > 0.0) || !(speed_scale_mps > 0.0))
    throw ConfigError("output scales must be > 0");
  (void)feature_side();
}

std::size_t ModelConfig::feature_side() const
{
  std::size_t side = input_side;
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const auto & l = conv[i];
    if (l.kernel == 0 || l.stride == 0 || l.channels == 0)
      throw ConfigError("conv layer " + std::to_string(i + 1) + " has a zero parameter");
    if (l.kernel > side)
      throw ConfigError(
        "conv layer " + std::to_string(i + 1) + " kernel " + std::to_string(l.kernel) +
        " exceeds its " + std::to_string(side) + "x" + std::to_string(side) + " input");
    side = (side - l.kernel) / l.stride + 1;
  }
  return side;
}

std::size_t ModelConfig::feature_size() const
{
  const std::size_t s = feature_side();
  return s * s * conv.back().channels;
}

bool ModelConfig::same_architecture(const ModelConfig & o) const
{
  return kind == o.kind && input_side == o.input_side && conv == o.conv && fc == o.fc &&
         lstm_hidden == o.lstm_hidden && sequence_length == o.sequence_length &&
         sequence_stride == o.sequence_stride && speed_window == o.speed_window &&
         speed_encoder == o.speed_encoder && speed_head_hidden == o.speed_head_hidden &&
         angle_scale_deg == o.angle_scale_deg && speed_scale_mps == o.speed_scale_mps;
}

std::vector<std::string> ModelConfig::differing_keys(const ModelConfig & other) const
{
  const auto a = to_text().entries();
  const auto b = other.to_text().entries();
  std::vector<std::string> out;
  for (const auto & [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second != v) out.push_back(k);
  }
  return out;
}

namespace
{

std::string fmt_real(double v)
{
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string format_conv_spec(const std::vector<ConvLayerSpec> & conv)
{
  std::string s;
  for (std::size_t i = 0; i < conv.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(conv[i].kernel) + "/" + std::to_string(conv[i].stride) + "/" +
         std::to_string(conv[i].channels);
  }
  return s;
}

std::vector<ConvLayerSpec> parse_conv_spec(const std::string & text)
{
  std::vector<ConvLayerSpec> out;
  for (const auto & item : split(text, ',')) {
    const auto parts = split(trim(item), '/');
    if (parts.size() != 3)
      throw ConfigError("conv layer '" + item + "' must be kernel/stride/channels");
    ConvLayerSpec l;
    const long long k = parse_int("conv", parts[0]);
    const long long s = parse_int("conv", parts[1]);
    const long long c = parse_int("conv", parts[2]);
    if (k <= 0 || s <= 0 || c <= 0) throw ConfigError("conv layer '" + item + "' must be positive");
    l.kernel = static_cast<std::size_t>(k);
    l.stride = static_cast<std::size_t>(s);
    l.channels = static_cast<std::size_t>(c);
    out.push_back(l);
  }
  return out;
}

std::string format_widths(const std::vector<std::size_t> & widths)
{
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(widths[i]);
  }
  return s;
}

std::vector<std::size_t> parse_widths(const std::string & key, const std::string & text)
{
  std::vector<std::size_t> out;
  if (trim(text).empty()) return out;
  for (const auto & item : split(text, ',')) {
    const long long v = parse_int(key, trim(item));
    if (v <= 0) throw ConfigError(key + ": widths must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

KeyValueText ModelConfig::to_text() const
{
  KeyValueText kv;
  kv.set("model.kind", model_kind_name(kind));
  kv.set("model.input_side", std::to_string(input_side));
  kv.set("model.conv", format_conv_spec(conv));
  kv.set("model.fc", format_widths(fc));
  kv.set("model.lstm_hidden", std::to_string(lstm_hidden));
  kv.set("model.sequence_length", std::to_string(sequence_length));
  kv.set("model.sequence_stride", std::to_string(sequence_stride));
  kv.set("model.speed_window", std::to_string(speed_window));
  kv.set("model.speed_encoder", format_widths(speed_encoder));
  kv.set("model.speed_head_hidden", std::to_string(speed_head_hidden));
  kv.set("model.angle_scale_deg", fmt_real(angle_scale_deg));
  kv.set("model.speed_scale_mps", fmt_real(speed_scale_mps));
  kv.set("model.task_weight", fmt_real(task_weight));
  kv.set("model.angle_weight_beta_deg", fmt_real(angle_weight_beta_deg));
  kv.set("model.angle_weight_cap", fmt_real(angle_weight_cap));
  return kv;
}

ModelConfig ModelConfig::from_text(const KeyValueText & kv)
{
  ModelConfig c = defaults(kv.contains("model.kind") ? parse_model_kind(kv.get("model.kind"))
                                                     : ModelKind::Mmmt);
  auto size_key = [&](const char * key, std::size_t & dst) {
    if (!kv.contains(key)) return;
    const long long v = kv.get_int(key);
    if (v < 0) throw ConfigError(std::string(key) + " must be >= 0");
    dst = static_cast<std::size_t>(v);
  };
  auto real_key = [&](const char * key, double & dst) {
    if (kv.contains(key)) dst = kv.get_double(key);
  };
  size_key("model.input_side", c.input_side);
  if (kv.contains("model.conv")) c.conv = parse_conv_spec(kv.get("model.conv"));
  if (kv.contains("model.fc")) c.fc = parse_widths("model.fc", kv.get("model.fc"));
  size_key("model.lstm_hidden", c.lstm_hidden);
  size_key("model.sequence_length", c.sequence_length);
  size_key("model.sequence_stride", c.sequence_stride);
  size_key("model.speed_window", c.speed_window);
  if (kv.contains("model.speed_encoder"))
    c.speed_encoder = parse_widths("model.speed_encoder", kv.get("model.speed_encoder"));
  size_key("model.speed_head_hidden", c.speed_head_hidden);
  real_key("model.angle_scale_deg", c.angle_scale_deg);
  real_key("model.speed_scale_mps", c.speed_scale_mps);
  real_key("model.task_weight", c.task_weight);
  real_key("model.angle_weight_beta_deg", c.angle_weight_beta_deg);
  real_key("model.angle_weight_cap", c.angle_weight_cap);
  for (const auto & [k, v] : kv.entries()) {
    (void)v;
    if (k.rfind("model.", 0) == 0 && !c.to_text().contains(k))
      throw ConfigError("unknown config key '" + k + "'");
  }
  c.validate();
  return c;
}

double sample_weight(double steering_deg, double beta_deg, double cap)
{
  if (!(beta_deg > 0.0)) throw ValueError("sample_weight: beta must be > 0");
  return std::min(1.0 + std::abs(steering_deg) / beta_deg, cap);
}

}  // namespace emvc::models
