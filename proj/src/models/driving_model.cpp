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

#include "emvc/models/driving_model.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "emvc/common/error.hpp"

namespace emvc::models
{

using autodiff::Shape;

std::optional<SpeedCommand> Prediction::command() const
{
  if (!command_logits) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumSpeedCommands; ++i)
    if ((*command_logits)[i] > (*command_logits)[best]) best = i;
  return command_from_index(best);
}

namespace
{

std::string layer(const char * prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

template <typename Real>
void fill_uniform(Tensor<Real> & t, double limit, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> dist(-limit, limit);
  // Rounded through float so float and double models start from the same point.
  for (auto & v : t.data()) v = static_cast<Real>(static_cast<float>(dist(rng)));
}

}  // namespace

template <typename Real>
DrivingModel<Real>::DrivingModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config))
{
  config_.validate();
  std::mt19937_64 rng(seed);
  const auto & c = config_;

  auto add_dense = [&](const std::string & name, std::size_t n, std::size_t m, bool head) {
    auto & w = params_.add(name + ".w", Shape{n, m});
    params_.add(name + ".b", Shape{m});
    const double limit = head ? std::sqrt(6.0 / static_cast<double>(n + m))
                              : std::sqrt(6.0 / static_cast<double>(n));
    fill_uniform(w, limit, rng);
  };

  std::size_t in_c = 3;
  for (std::size_t i = 0; i < c.conv.size(); ++i) {
    const auto & l = c.conv[i];
    auto & w = params_.add(layer("conv", i) + ".w", Shape{l.kernel, l.kernel, in_c, l.channels});
    params_.add(layer("conv", i) + ".b", Shape{l.channels});
    fill_uniform(w, std::sqrt(6.0 / static_cast<double>(l.kernel * l.kernel * in_c)), rng);
    in_c = l.channels;
  }

  std::size_t width = c.feature_size();
  const std::size_t pre_lstm = c.kind == ModelKind::Command ? c.fc.size() - 1 : c.fc.size();
  for (std::size_t i = 0; i < pre_lstm; ++i) {
    add_dense(layer("fc", i), width, c.fc[i], false);
    width = c.fc[i];
  }

  if (c.kind == ModelKind::Command) {
    const std::size_t u = c.lstm_hidden;
    auto & wx = params_.add("lstm.w_x", Shape{width, 4 * u});
    auto & wh = params_.add("lstm.w_h", Shape{u, 4 * u});
    auto & b = params_.add("lstm.b", Shape{4 * u});
    const double limit = 1.0 / std::sqrt(static_cast<double>(u));
    fill_uniform(wx, limit, rng);
    fill_uniform(wh, limit, rng);
    for (std::size_t j = u; j < 2 * u; ++j) b[j] = Real(1);
    add_dense(layer("fc", c.fc.size() - 1), u, c.fc.back(), false);
    width = c.fc.back();
    add_dense("steer", width, 1, true);
    add_dense("command", width, kNumSpeedCommands, true);
  } else {
    add_dense("steer", width, 1, true);
  }

  if (c.kind == ModelKind::Mmmt) {
    std::size_t enc = c.speed_window;
    for (std::size_t i = 0; i < c.speed_encoder.size(); ++i) {
      add_dense(layer("speed_enc", i), enc, c.speed_encoder[i], false);
      enc = c.speed_encoder[i];
    }
    add_dense("speed_fc", width + enc, c.speed_head_hidden, false);
    add_dense("speed_out", c.speed_head_hidden, 1, true);
  }
}

template <typename Real>
void DrivingModel<Real>::set_loss_settings(const ModelConfig & config)
{
  if (!config_.same_architecture(config))
    throw ConfigError("loss settings come from a config with a different architecture");
  config.validate();
  config_.task_weight = config.task_weight;
  config_.angle_weight_beta_deg = config.angle_weight_beta_deg;
  config_.angle_weight_cap = config.angle_weight_cap;
}

template <typename Real>
void DrivingModel<Real>::check_input(const ModelInput<Real> & input) const
{
  const auto & c = config_;
  if (input.frames.empty()) throw ValueError(model_kind_name(c.kind) + " model: empty frame sequence");
  if (c.kind != ModelKind::Command && input.frames.size() != 1)
    throw ShapeError(
      model_kind_name(c.kind) + " model takes one frame, got " + std::to_string(input.frames.size()));
  const Shape expected{c.input_side, c.input_side, 3};
  for (const auto * f : input.frames) {
    if (f == nullptr) throw ValueError("null frame");
    if (f->dims() != expected)
      throw ShapeError(
        "frame dims " + autodiff::shape_string(f->dims()) + " do not match model input " +
        autodiff::shape_string(expected));
  }
  if (c.kind == ModelKind::Mmmt) {
    if (input.speed_window.size() != c.speed_window)
      throw ShapeError(
        "speed window has " + std::to_string(input.speed_window.size()) + " entries, model expects " +
        std::to_string(c.speed_window));
    for (double v : input.speed_window)
      if (!std::isfinite(v) || v < 0.0)
        throw ValueError("speed window entries must be finite and >= 0");
  }
}

template <typename Real>
template <typename Bind>
Heads DrivingModel<Real>::build(Graph<Real> & g, const ModelInput<Real> & input, Bind bind) const
{
  check_input(input);
  const auto & c = config_;
  std::map<std::string, Var> bound;
  auto p = [&](const std::string & name) {
    auto it = bound.find(name);
    if (it != bound.end()) return it->second;
    const Var v = bind(name);
    bound.emplace(name, v);
    return v;
  };
  auto dense = [&](const std::string & name, Var x) {
    return g.affine(x, p(name + ".w"), p(name + ".b"));
  };

  const std::size_t pre_lstm = c.kind == ModelKind::Command ? c.fc.size() - 1 : c.fc.size();
  auto encode_frame = [&](const Tensor<Real> & frame) {
    Var x = g.constant(frame);
    for (std::size_t i = 0; i < c.conv.size(); ++i) {
      const std::string name = layer("conv", i);
      x = g.relu(g.conv2d(x, p(name + ".w"), p(name + ".b"), c.conv[i].stride));
    }
    for (std::size_t i = 0; i < pre_lstm; ++i) x = g.relu(dense(layer("fc", i), x));
    return x;
  };

  Heads heads;
  if (c.kind == ModelKind::Command) {
    const std::size_t u = c.lstm_hidden;
    Var h = g.constant(Tensor<Real>(Shape{u}));
    Var cell = g.constant(Tensor<Real>(Shape{u}));
    for (const auto * frame : input.frames) {
      const Var x = encode_frame(*frame);
      const Var state = g.lstm_cell(x, h, cell, p("lstm.w_x"), p("lstm.w_h"), p("lstm.b"));
      h = g.slice(state, 0, u);
      cell = g.slice(state, u, u);
    }
    const Var shared = g.relu(dense(layer("fc", c.fc.size() - 1), h));
    heads.steering = g.scale(dense("steer", shared), static_cast<Real>(c.angle_scale_deg));
    heads.command_logits = dense("command", shared);
    return heads;
  }

  const Var visual = encode_frame(*input.frames.front());
  heads.steering = g.scale(dense("steer", visual), static_cast<Real>(c.angle_scale_deg));
  if (c.kind == ModelKind::Mmmt) {
    std::vector<Real> window(c.speed_window);
    for (std::size_t i = 0; i < window.size(); ++i)
      window[i] = static_cast<Real>(input.speed_window[i] / c.speed_scale_mps);
    Var s = g.constant(Tensor<Real>::vector(std::move(window)));
    for (std::size_t i = 0; i < c.speed_encoder.size(); ++i) s = g.relu(dense(layer("speed_enc", i), s));
    const std::array<Var, 2> parts{visual, s};
    const Var joint = g.relu(dense("speed_fc", g.concat(parts)));
    heads.speed = g.scale(dense("speed_out", joint), static_cast<Real>(c.speed_scale_mps));
  }
  return heads;
}

template <typename Real>
Heads DrivingModel<Real>::forward(Graph<Real> & g, const ModelInput<Real> & input)
{
  return build(g, input, [&](const std::string & name) { return g.parameter(params_.at(name)); });
}

template <typename Real>
Prediction DrivingModel<Real>::predict(const ModelInput<Real> & input) const
{
  Graph<Real> g;
  const Heads heads = build(g, input, [&](const std::string & name) {
    const auto & t = params_.at(name);
    return g.constant(Tensor<Real>(t.dims(), t.storage()));
  });
  Prediction out;
  out.steering_deg = static_cast<double>(g.value(heads.steering).item());
  if (heads.speed.valid()) out.speed_mps = static_cast<double>(g.value(heads.speed).item());
  if (heads.command_logits.valid()) {
    const auto & v = g.value(heads.command_logits);
    std::array<double, kNumSpeedCommands> logits{};
    for (std::size_t i = 0; i < kNumSpeedCommands; ++i) logits[i] = static_cast<double>(v[i]);
    out.command_logits = logits;
  }
  return out;
}

template <typename Real>
void DrivingModel<Real>::zero_output_layers()
{
  for (const char * head : {"steer", "command", "speed_out"}) {
    const std::string name(head);
    if (!params_.contains(name + ".w")) continue;
    for (const char * suffix : {".w", ".b"}) {
      auto & t = params_.at(name + suffix);
      std::fill(t.data().begin(), t.data().end(), Real(0));
    }
  }
}

template <typename Real>
LossTerms composite_loss(
  Graph<Real> & g, ModelKind kind, std::span<const Heads> heads,
  std::span<const LossTarget> targets, double task_weight)
{
  if (heads.empty() || heads.size() != targets.size())
    throw ValueError(
      "composite_loss: " + std::to_string(heads.size()) + " predictions vs " +
      std::to_string(targets.size()) + " targets");
  if (!(task_weight >= 0.0)) throw ValueError("composite_loss: task weight must be >= 0");
  const std::size_t n = heads.size();

  std::vector<Var> steer(n);
  std::vector<Real> angle_target(n), angle_weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!heads[i].steering.valid()) throw ValueError("composite_loss: missing steering head");
    steer[i] = heads[i].steering;
    angle_target[i] = static_cast<Real>(targets[i].steering_deg);
    angle_weight[i] = static_cast<Real>(targets[i].weight);
  }
  LossTerms out;
  out.angle = g.weighted_mae(
    g.concat(steer), Tensor<Real>::vector(std::move(angle_target)),
    Tensor<Real>::vector(std::move(angle_weight)));

  if (kind == ModelKind::Base) {
    out.total = out.angle;
    return out;
  }

  if (kind == ModelKind::Mmmt) {
    std::vector<Var> speed(n);
    std::vector<Real> speed_target(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!heads[i].speed.valid() || !targets[i].speed_mps)
        throw ValueError("composite_loss: mmmt needs a speed prediction and speed target");
      speed[i] = heads[i].speed;
      speed_target[i] = static_cast<Real>(*targets[i].speed_mps);
    }
    out.second = g.weighted_mae(
      g.concat(speed), Tensor<Real>::vector(std::move(speed_target)),
      Tensor<Real>::vector(std::vector<Real>(n, Real(1))));
  } else {
    std::vector<Var> logits(n);
    Tensor<Real> onehot(Shape{n, kNumSpeedCommands});
    for (std::size_t i = 0; i < n; ++i) {
      if (!heads[i].command_logits.valid() || !targets[i].command)
        throw ValueError("composite_loss: command net needs logits and a command target");
      logits[i] = heads[i].command_logits;
      onehot[i * kNumSpeedCommands + command_index(*targets[i].command)] = Real(1);
    }
    const Var joined = g.reshape(g.concat(logits), Shape{n, kNumSpeedCommands});
    out.second = g.softmax_cross_entropy(joined, std::move(onehot));
  }
  out.total = g.add(out.angle, g.scale(out.second, static_cast<Real>(task_weight)));
  return out;
}

template class DrivingModel<float>;
template class DrivingModel<double>;
template LossTerms composite_loss<float>(
  Graph<float> &, ModelKind, std::span<const Heads>, std::span<const LossTarget>, double);
template LossTerms composite_loss<double>(
  Graph<double> &, ModelKind, std::span<const Heads>, std::span<const LossTarget>, double);

}  // namespace emvc::models
