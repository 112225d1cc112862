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

#ifndef EMVC__COMMON__SPEED_COMMAND_HPP_
#define EMVC__COMMON__SPEED_COMMAND_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace emvc
{

// Discrete longitudinal command. The numeric value is the class index used by
// one-hot targets and logits.
enum class SpeedCommand : std::size_t
{
  Accelerate = 0,
  Decelerate = 1,
  Maintain = 2,
};

inline constexpr std::size_t kNumSpeedCommands = 3;

inline constexpr std::array<SpeedCommand, kNumSpeedCommands> kAllSpeedCommands = {
  SpeedCommand::Accelerate, SpeedCommand::Decelerate, SpeedCommand::Maintain};

inline std::size_t command_index(SpeedCommand c) { return static_cast<std::size_t>(c); }

inline SpeedCommand command_from_index(std::size_t i) { return static_cast<SpeedCommand>(i); }

inline std::string_view command_name(SpeedCommand c)
{
  switch (c) {
    case SpeedCommand::Accelerate: return "accelerate";
    case SpeedCommand::Decelerate: return "decelerate";
    case SpeedCommand::Maintain: return "maintain";
  }
  return "?";
}

}  // namespace emvc

#endif  // EMVC__COMMON__SPEED_COMMAND_HPP_
