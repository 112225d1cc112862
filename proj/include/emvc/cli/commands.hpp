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

#ifndef EMVC__CLI__COMMANDS_HPP_
#define EMVC__CLI__COMMANDS_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "emvc/autodiff/graph.hpp"
#include "emvc/cli/run_config.hpp"

namespace emvc::cli
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitAcceptance = 3,
};

int cmd_datagen(const RunConfig & config, std::ostream & out);
int cmd_prep(const RunConfig & config, std::ostream & out);

struct TrainFlags
{
  bool resume = false;
  // Stop after this many epochs in this invocation (simulates an interrupt).
  std::optional<std::size_t> stop_after_epochs;
};
int cmd_train(const RunConfig & config, const TrainFlags & flags, std::ostream & out);

int cmd_eval(const RunConfig & config, std::ostream & out);
int cmd_drive(const RunConfig & config, std::ostream & out);

struct GradcheckFlags
{
  autodiff::BackwardFault fault = autodiff::BackwardFault::None;
};
int cmd_gradcheck(const RunConfig & config, const GradcheckFlags & flags, std::ostream & out);

// Parses argv (CLI11), loads --config and --set overrides, dispatches, and
// maps exceptions to exit codes.
int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

// Config text restricted to keys that affect a stage's output (paths excluded).
std::string stage_fingerprint(const RunConfig & config, const std::vector<std::string> & prefixes);

}  // namespace emvc::cli

#endif  // EMVC__CLI__COMMANDS_HPP_
