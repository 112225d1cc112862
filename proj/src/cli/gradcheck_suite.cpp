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

#include "emvc/cli/gradcheck_suite.hpp"

#include <array>
#include <functional>
#include <random>

#include "emvc/autodiff/parameters.hpp"
#include "emvc/models/driving_model.hpp"

namespace emvc::cli
{

namespace
{

using autodiff::Graph;
using autodiff::ParameterStore;
using autodiff::Shape;
using autodiff::Tensor;
using autodiff::Var;

void fill(Tensor<double> & t, std::mt19937_64 & rng, double lo = -1.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto & v : t.data()) v = d(rng);
}

Tensor<double> random_tensor(Shape dims, std::mt19937_64 & rng, double lo = -1.0, double hi = 1.0)
{
  Tensor<double> t(std::move(dims));
  fill(t, rng, lo, hi);
  return t;
}

// Reduces any output to a scalar with fixed random coefficients.
Var project_to_scalar(Graph<double> & g, Var y, const Tensor<double> & coeffs)
{
  return g.affine(y, g.constant(coeffs), g.constant(Tensor<double>(Shape{1})));
}

GradcheckRow finish(std::string name, const autodiff::GradCheckReport & r, double tol)
{
  GradcheckRow row;
  row.name = std::move(name);
  row.max_rel_error = r.max_rel_error;
  row.worst_tensor = r.worst_tensor;
  row.checked = r.checked;
  row.skipped_nonsmooth = r.skipped_nonsmooth;
  row.passed = r.passed(tol);
  return row;
}

struct OpCase
{
  const char * name;
  // Adds inputs to the store; returns the op output for the given graph.
  std::function<void(ParameterStore<double> &, std::mt19937_64 &)> setup;
  std::function<Var(Graph<double> &, ParameterStore<double> &)> build;
};

std::vector<OpCase> op_cases()
{
  auto p = [](Graph<double> & g, ParameterStore<double> & s, const char * n) { return g.parameter(s.at(n)); };
  std::vector<OpCase> cases;
  cases.push_back({"conv2d",
                   [](auto & s, auto & rng) {
                     fill(s.add("x", Shape{7, 6, 2}), rng);
                     fill(s.add("w", Shape{3, 3, 2, 3}), rng);
                     fill(s.add("b", Shape{3}), rng);
                   },
                   [p](auto & g, auto & s) { return g.conv2d(p(g, s, "x"), p(g, s, "w"), p(g, s, "b"), 2); }});
  cases.push_back({"affine",
                   [](auto & s, auto & rng) {
                     fill(s.add("x", Shape{5}), rng);
                     fill(s.add("w", Shape{5, 4}), rng);
                     fill(s.add("b", Shape{4}), rng);
                   },
                   [p](auto & g, auto & s) { return g.affine(p(g, s, "x"), p(g, s, "w"), p(g, s, "b")); }});
  cases.push_back({"relu", [](auto & s, auto & rng) { fill(s.add("x", Shape{9}), rng); },
                   [p](auto & g, auto & s) { return g.relu(p(g, s, "x")); }});
  cases.push_back({"concat",
                   [](auto & s, auto & rng) {
                     fill(s.add("a", Shape{3}), rng);
                     fill(s.add("b", Shape{2, 2}), rng);
                   },
                   [p](auto & g, auto & s) {
                     const std::array<Var, 2> parts{p(g, s, "a"), p(g, s, "b")};
                     return g.concat(parts);
                   }});
  cases.push_back({"slice", [](auto & s, auto & rng) { fill(s.add("x", Shape{8}), rng); },
                   [p](auto & g, auto & s) { return g.slice(p(g, s, "x"), 2, 4); }});
  cases.push_back({"reshape", [](auto & s, auto & rng) { fill(s.add("x", Shape{2, 3}), rng); },
                   [p](auto & g, auto & s) { return g.reshape(p(g, s, "x"), Shape{3, 2}); }});
  cases.push_back({"lstm_cell",
                   [](auto & s, auto & rng) {
                     fill(s.add("x", Shape{4}), rng);
                     fill(s.add("h", Shape{3}), rng);
                     fill(s.add("c", Shape{3}), rng);
                     fill(s.add("w_x", Shape{4, 12}), rng);
                     fill(s.add("w_h", Shape{3, 12}), rng);
                     fill(s.add("b", Shape{12}), rng);
                   },
                   [p](auto & g, auto & s) {
                     return g.lstm_cell(p(g, s, "x"), p(g, s, "h"), p(g, s, "c"), p(g, s, "w_x"),
                                        p(g, s, "w_h"), p(g, s, "b"));
                   }});
  cases.push_back({"softmax_cross_entropy", [](auto & s, auto & rng) { fill(s.add("x", Shape{2, 3}), rng, -2, 2); },
                   [p](auto & g, auto & s) {
                     Tensor<double> t(Shape{2, 3});
                     t[1] = 1.0;
                     t[5] = 1.0;
                     return g.softmax_cross_entropy(p(g, s, "x"), t);
                   }});
  cases.push_back({"weighted_mae", [](auto & s, auto & rng) { fill(s.add("x", Shape{5}), rng); },
                   [p](auto & g, auto & s) {
                     return g.weighted_mae(
                       p(g, s, "x"), Tensor<double>::vector({0.5, -0.5, 0.25, 2.0, -1.5}),
                       Tensor<double>::vector({1.0, 2.0, 3.0, 1.5, 4.0}));
                   }});
  cases.push_back({"add",
                   [](auto & s, auto & rng) {
                     fill(s.add("a", Shape{4}), rng);
                     fill(s.add("b", Shape{4}), rng);
                   },
                   [p](auto & g, auto & s) { return g.add(p(g, s, "a"), p(g, s, "b")); }});
  cases.push_back({"scale", [](auto & s, auto & rng) { fill(s.add("x", Shape{4}), rng); },
                   [p](auto & g, auto & s) { return g.scale(p(g, s, "x"), -1.75); }});
  return cases;
}

}  // namespace

std::vector<GradcheckRow> run_gradcheck_suite(const GradcheckSuiteOptions & options)
{
  autodiff::GradCheckOptions gc;
  gc.samples_per_tensor = options.samples_per_tensor;
  gc.seed = options.seed;
  gc.fault = options.fault;

  std::vector<GradcheckRow> rows;
  std::mt19937_64 rng(options.seed);
  for (const auto & op : op_cases()) {
    ParameterStore<double> store;
    op.setup(store, rng);
    // Coefficients sized from one dry run.
    Graph<double> probe;
    const std::size_t n = probe.value(op.build(probe, store)).size();
    const auto coeffs = random_tensor(Shape{n, 1}, rng);
    const auto report = autodiff::grad_check(
      store,
      [&](Graph<double> & g) {
        const Var y = op.build(g, store);
        return g.value(y).size() == 1 ? y : project_to_scalar(g, y, coeffs);
      },
      gc);
    rows.push_back(finish(std::string("op:") + op.name, report, options.tolerance));
  }

  for (auto kind : {models::ModelKind::Base, models::ModelKind::Command, models::ModelKind::Mmmt}) {
    const auto cfg = models::ModelConfig::toy(kind);
    models::DrivingModel<double> model(cfg, options.seed);
    std::vector<Tensor<double>> frames;
    const std::size_t n_examples = 2;
    const std::size_t per_example = kind == models::ModelKind::Command ? cfg.sequence_length : 1;
    for (std::size_t i = 0; i < n_examples * per_example; ++i)
      frames.push_back(random_tensor(Shape{cfg.input_side, cfg.input_side, 3}, rng, 0.0, 1.0));
    std::vector<models::LossTarget> targets(n_examples);
    std::uniform_real_distribution<double> angle(-20.0, 20.0), speed(5.0, 15.0);
    for (std::size_t i = 0; i < n_examples; ++i) {
      targets[i].steering_deg = angle(rng);
      targets[i].weight = models::sample_weight(targets[i].steering_deg);
      targets[i].speed_mps = speed(rng);
      targets[i].command = command_from_index(i % kNumSpeedCommands);
    }
    std::vector<std::vector<double>> windows(n_examples, std::vector<double>(cfg.speed_window));
    for (auto & w : windows)
      for (auto & v : w) v = speed(rng);

    const auto report = autodiff::grad_check(
      model.parameters(),
      [&](Graph<double> & g) {
        std::vector<models::Heads> heads;
        for (std::size_t i = 0; i < n_examples; ++i) {
          models::ModelInput<double> in;
          for (std::size_t f = 0; f < per_example; ++f) in.frames.push_back(&frames[i * per_example + f]);
          in.speed_window = windows[i];
          heads.push_back(model.forward(g, in));
        }
        return models::composite_loss<double>(g, kind, heads, targets, cfg.task_weight).total;
      },
      gc);
    rows.push_back(finish("model:" + models::model_kind_name(kind), report, options.tolerance));
  }
  return rows;
}

}  // namespace emvc::cli
