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

#ifndef EMVC__MODELS__MODEL_CONFIG_HPP_
#define EMVC__MODELS__MODEL_CONFIG_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "emvc/common/key_value.hpp"

namespace emvc::models
{

enum class ModelKind
{
  // Single frame -> steering.
  Base,
  // Frame sequence -> CNN features -> LSTM -> steering + speed-command logits.
  Command,
  // Single frame + feedback-speed window -> steering + next-frame speed.
  Mmmt,
};

ModelKind parse_model_kind(const std::string & name);
std::string model_kind_name(ModelKind kind);

struct ConvLayerSpec
{
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t channels = 8;

  bool operator==(const ConvLayerSpec &) const = default;
};

struct ModelConfig
{
  ModelKind kind = ModelKind::Mmmt;
  // Square input (width squeezed to 1:1 before the network).
  std::size_t input_side = 128;
  std::vector<ConvLayerSpec> conv = {{11, 4, 24}, {5, 2, 36}, {3, 2, 48}, {3, 1, 64}, {3, 1, 64}};
  // Hidden FC widths; the regression/classification heads follow the last one.
  // The command network runs all but the last before its LSTM and the last one
  // after it, shared by both heads.
  std::vector<std::size_t> fc = {512, 128, 32};
  std::size_t lstm_hidden = 64;
  std::size_t sequence_length = 5;
  // Stream frames between consecutive sequence frames (3 at 30 fps = 10 Hz).
  std::size_t sequence_stride = 3;
  std::size_t speed_window = 10;
  std::vector<std::size_t> speed_encoder = {32, 32};
  std::size_t speed_head_hidden = 32;
  // Network outputs are multiplied by these so the heads emit degrees and m/s;
  // the speed window is divided by speed_scale_mps before encoding.
  double angle_scale_deg = 30.0;
  double speed_scale_mps = 30.0;

  // Loss settings (not part of the architecture).
  double task_weight = 1.0;
  double angle_weight_beta_deg = 5.0;
  double angle_weight_cap = 4.0;

  static ModelConfig defaults(ModelKind kind);
  // Tiny layer sizes on a 16x16 input, for gradient checking.
  static ModelConfig toy(ModelKind kind);

  // Throws ConfigError on inconsistent settings (including a conv stack that
  // does not fit the input).
  void validate() const;
  // Side length of the last conv feature map.
  std::size_t feature_side() const;
  std::size_t feature_size() const;

  bool same_architecture(const ModelConfig & other) const;
  // Keys whose values differ between the two configs.
  std::vector<std::string> differing_keys(const ModelConfig & other) const;

  KeyValueText to_text() const;
  static ModelConfig from_text(const KeyValueText & kv);
};

std::string format_conv_spec(const std::vector<ConvLayerSpec> & conv);
std::vector<ConvLayerSpec> parse_conv_spec(const std::string & text);
std::string format_widths(const std::vector<std::size_t> & widths);
std::vector<std::size_t> parse_widths(const std::string & key, const std::string & text);

// Training weight for a steering sample: min(1 + |theta| / beta, cap).
double sample_weight(double steering_deg, double beta_deg = 5.0, double cap = 4.0);

}  // namespace emvc::models

#endif  // EMVC__MODELS__MODEL_CONFIG_HPP_
