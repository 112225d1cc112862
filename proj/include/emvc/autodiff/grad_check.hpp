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

#ifndef EMVC__AUTODIFF__GRAD_CHECK_HPP_
#define EMVC__AUTODIFF__GRAD_CHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "emvc/autodiff/graph.hpp"
#include "emvc/autodiff/parameters.hpp"

namespace emvc::autodiff
{

struct GradCheckOptions
{
  double step = 1e-5;
  // Coordinates sampled per parameter tensor (all coordinates if the tensor is smaller).
  std::size_t samples_per_tensor = 4;
  std::uint64_t seed = 1;
  // Coordinates whose one-sided slopes disagree by more than this fraction are
  // treated as straddling a kink (ReLU, |x|) and skipped.
  double kink_tolerance = 1e-2;
  BackwardFault fault = BackwardFault::None;
};

struct GradCheckEntry
{
  std::string tensor;
  std::size_t index = 0;
  double analytic = 0;
  double numeric = 0;
  double rel_error = 0;
};

struct GradCheckReport
{
  double max_rel_error = 0;
  std::string worst_tensor;
  std::size_t checked = 0;
  std::size_t skipped_nonsmooth = 0;
  std::vector<GradCheckEntry> entries;

  bool passed(double tolerance) const { return checked > 0 && max_rel_error < tolerance; }
};

// |a - n| / max(|a|, |n|, floor) with floor = 1e-6 * max(1, |loss|), which keeps
// finite-difference round-off on vanishing gradients from reading as error.
double relative_error(double analytic, double numeric, double loss_value);

using LossBuilder = std::function<Var(Graph<double> &)>;

// Compares backward() against central differences for sampled coordinates of
// every tensor in `params`. The loss graph is built once and replayed for each
// perturbation; parameters are restored before returning.
GradCheckReport grad_check(
  ParameterStore<double> & params, const LossBuilder & build_loss,
  const GradCheckOptions & options = {});

}  // namespace emvc::autodiff

#endif  // EMVC__AUTODIFF__GRAD_CHECK_HPP_
