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

#include "emvc/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace emvc::autodiff
{

double relative_error(double analytic, double numeric, double loss_value)
{
  const double floor = 1e-6 * std::max(1.0, std::abs(loss_value));
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(
  ParameterStore<double> & params, const LossBuilder & build_loss, const GradCheckOptions & options)
{
  GradCheckReport report;
  params.zero_grad();
  Graph<double> graph;
  graph.set_fault(options.fault);
  const Var loss = build_loss(graph);
  graph.backward(loss);
  const double f0 = graph.value(loss).item();
  const double h = options.step;

  std::mt19937_64 rng(options.seed);
  for (auto & entry : params) {
    auto & tensor = entry.tensor;
    std::vector<std::size_t> coords(tensor.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > options.samples_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.samples_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (const auto i : coords) {
      const double original = tensor[i];
      tensor[i] = original + h;
      graph.replay();
      const double f_plus = graph.value(loss).item();
      tensor[i] = original - h;
      graph.replay();
      const double f_minus = graph.value(loss).item();
      tensor[i] = original;

      const double slope_plus = (f_plus - f0) / h;
      const double slope_minus = (f0 - f_minus) / h;
      const double slope_scale = std::max(
        {std::abs(slope_plus), std::abs(slope_minus), 1e-6 * std::max(1.0, std::abs(f0))});
      if (std::abs(slope_plus - slope_minus) > options.kink_tolerance * slope_scale) {
        ++report.skipped_nonsmooth;
        continue;
      }

      GradCheckEntry e;
      e.tensor = entry.name;
      e.index = i;
      e.analytic = tensor.grad()[i];
      e.numeric = (f_plus - f_minus) / (2 * h);
      e.rel_error = relative_error(e.analytic, e.numeric, f0);
      if (e.rel_error > report.max_rel_error || report.checked == 0) {
        report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
        report.worst_tensor = e.tensor;
      }
      ++report.checked;
      report.entries.push_back(std::move(e));
    }
  }
  graph.replay();
  return report;
}

}  // namespace emvc::autodiff
