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

#ifndef EMVC__CLI__GRADCHECK_SUITE_HPP_
#define EMVC__CLI__GRADCHECK_SUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "emvc/autodiff/grad_check.hpp"

namespace emvc::cli
{

struct GradcheckRow
{
  // "op:<name>" or "model:<kind>"
  std::string name;
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
  std::size_t skipped_nonsmooth = 0;
  bool passed = false;
};

struct GradcheckSuiteOptions
{
  double tolerance = 1e-3;
  std::size_t samples_per_tensor = 6;
  std::uint64_t seed = 1;
  autodiff::BackwardFault fault = autodiff::BackwardFault::None;
};

// Finite-difference checks of every graph op in isolation and of the three
// architectures at toy sizes, all in double precision.
std::vector<GradcheckRow> run_gradcheck_suite(const GradcheckSuiteOptions & options);

}  // namespace emvc::cli

#endif  // EMVC__CLI__GRADCHECK_SUITE_HPP_
