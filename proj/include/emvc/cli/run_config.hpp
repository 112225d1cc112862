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

#ifndef EMVC__CLI__RUN_CONFIG_HPP_
#define EMVC__CLI__RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emvc/common/key_value.hpp"
#include "emvc/control/control.hpp"
#include "emvc/datapipe/prep.hpp"
#include "emvc/models/model_config.hpp"
#include "emvc/simworld/dataset.hpp"
#include "emvc/simworld/episode.hpp"
#include "emvc/training/trainer.hpp"

namespace emvc::cli
{

struct ConfigKey
{
  const char * name;
  const char * default_value;
  const char * help;
};

// Every accepted key with its default.
const std::vector<ConfigKey> & config_keys();

// Fully resolved run configuration: defaults overlaid with a config file and
// then with `key=value` overrides. Unknown keys throw ConfigError.
class RunConfig
{
public:
  RunConfig();
  static RunConfig load(const std::filesystem::path & path);
  static RunConfig parse(std::string_view text);

  void set(const std::string & key, const std::string & value);
  // "key=value"
  void apply_override(const std::string & assignment);

  const std::string & get(const std::string & key) const { return kv_.get(key); }
  double get_double(const std::string & key) const { return kv_.get_double(key); }
  long long get_int(const std::string & key) const { return kv_.get_int(key); }
  std::size_t get_size(const std::string & key) const;
  bool get_bool(const std::string & key) const { return kv_.get_bool(key); }

  std::string text() const { return kv_.serialize(); }
  std::uint64_t hash() const { return fnv1a64(text()); }
  std::string hash_hex() const { return hex64(hash()); }

  models::ModelConfig model_config() const;
  simworld::DatasetOptions dataset_options() const;
  datapipe::PrepConfig prep_config() const;
  training::TrainOptions train_options() const;
  simworld::EpisodeOptions episode_options() const;
  simworld::ModelControllerOptions controller_options() const;
  simworld::RoadOptions road_options() const;
  simworld::OracleOptions oracle_options() const;
  simworld::CameraParams camera_params() const;

  // Subset of keys under `prefix` (e.g. "prep."), used to fingerprint stages.
  std::string section_text(const std::vector<std::string> & prefixes) const;

private:
  KeyValueText kv_;
};

// Parses "1,2,5-8" into {1,2,5,6,7,8}.
std::vector<std::uint64_t> parse_seed_list(const std::string & key, const std::string & text);

}  // namespace emvc::cli

#endif  // EMVC__CLI__RUN_CONFIG_HPP_
