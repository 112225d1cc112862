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

#ifndef EMVC__MODELS__CHECKPOINT_HPP_
#define EMVC__MODELS__CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "emvc/models/driving_model.hpp"

namespace emvc::models
{

inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename Real>
struct LoadedModel
{
  DrivingModel<Real> model;
  // Non-architectural settings that were overridden by the expected config.
  std::vector<std::string> warnings;
};

// Parameters are stored as little-endian float32.
template <typename Real>
std::string save_checkpoint(const DrivingModel<Real> & model);

// Throws FormatError on bad magic/version, truncation, missing, duplicate or
// misshapen tensors. With `expected`, an architecture mismatch throws
// ConfigError; differing loss settings are taken from `expected` and reported
// in `warnings`.
template <typename Real>
LoadedModel<Real> load_checkpoint(std::string_view bytes, const ModelConfig * expected = nullptr);

// Reads only the embedded config.
ModelConfig read_checkpoint_config(std::string_view bytes);

}  // namespace emvc::models

#endif  // EMVC__MODELS__CHECKPOINT_HPP_
