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


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "emvc/common/error.hpp"
#include "emvc/models/checkpoint.hpp"
#include "emvc/models/driving_model.hpp"
#include "emvc/models/model_config.hpp"
#include "test_util.hpp"

namespace
{

using emvc::autodiff::Graph;
using emvc::autodiff::Shape;
using emvc::autodiff::Tensor;
using emvc::models::composite_loss;
using emvc::models::DrivingModel;
using emvc::models::Heads;
using emvc::models::LossTarget;
using emvc::models::ModelConfig;
using emvc::models::ModelInput;
using emvc::models::ModelKind;
using emvc::testing::random_tensor;

constexpr ModelKind kKinds[] = {ModelKind::Base, ModelKind::Command, ModelKind::Mmmt};

template <typename Real>
struct ToyInput
{
  std::vector<Tensor<Real>> frames;
  std::vector<double> window;

  ModelInput<Real> view() const
  {
    ModelInput<Real> in;
    for (const auto & f : frames) in.frames.push_back(&f);
    in.speed_window = window;
    return in;
  }
};

template <typename Real>
ToyInput<Real> toy_input(const ModelConfig & c, std::mt19937_64 & rng)
{
  ToyInput<Real> t;
  const std::size_t n = c.kind == ModelKind::Command ? c.sequence_length : 1;
  for (std::size_t i = 0; i < n; ++i)
    t.frames.push_back(random_tensor<Real>(Shape{c.input_side, c.input_side, 3}, rng, 0.0, 1.0));
  if (c.kind == ModelKind::Mmmt) {
    std::uniform_real_distribution<double> u(0.0, 25.0);
    for (std::size_t i = 0; i < c.speed_window; ++i) t.window.push_back(u(rng));
  }
  return t;
}

TEST(ModelConfig, DefaultShapes)
{
  const auto c = ModelConfig::defaults(ModelKind::Base);
  // 128 -> 30 -> 13 -> 6 -> 4 -> 2 with valid padding.
  EXPECT_EQ(c.feature_side(), 2u);
  EXPECT_EQ(c.feature_size(), 2u * 2u * 64u);
  EXPECT_DOUBLE_EQ(ModelConfig::defaults(ModelKind::Command).task_weight, 0.5);
}

TEST(ModelConfig, TextRoundTrip)
{
  for (auto kind : kKinds) {
    auto c = ModelConfig::toy(kind);
    c.task_weight = 0.3;
    const auto back = ModelConfig::from_text(c.to_text());
    EXPECT_TRUE(back.same_architecture(c));
    EXPECT_TRUE(back.differing_keys(c).empty());
  }
}

TEST(ModelConfig, RejectsBadValues)
{
  auto c = ModelConfig::toy(ModelKind::Base);
  c.input_side = 4;
  EXPECT_THROW(c.validate(), emvc::ConfigError);
  EXPECT_THROW(emvc::models::parse_conv_spec("3/0/4"), emvc::ConfigError);
  EXPECT_THROW(emvc::models::parse_model_kind("resnet"), emvc::ConfigError);
  EXPECT_EQ(emvc::models::format_conv_spec(emvc::models::parse_conv_spec("11/4/24,5/2/36")),
    "11/4/24,5/2/36");
}

TEST(SampleWeight, HandValues)
{
  EXPECT_DOUBLE_EQ(emvc::models::sample_weight(0.0), 1.0);
  EXPECT_DOUBLE_EQ(emvc::models::sample_weight(5.0), 2.0);
  EXPECT_DOUBLE_EQ(emvc::models::sample_weight(-5.0), 2.0);
  EXPECT_DOUBLE_EQ(emvc::models::sample_weight(100.0), 4.0);
}

TEST(DrivingModel, ZeroOutputLayersGiveZeroSteering)
{
  std::mt19937_64 rng(3);
  for (auto kind : kKinds) {
    DrivingModel<double> m(ModelConfig::toy(kind), 11);
    m.zero_output_layers();
    for (int rep = 0; rep < 3; ++rep) {
      const auto in = toy_input<double>(m.config(), rng);
      EXPECT_EQ(m.predict(in.view()).steering_deg, 0.0);
    }
  }
}

TEST(DrivingModel, SameSeedSameOutput)
{
  std::mt19937_64 rng(5);
  for (auto kind : kKinds) {
    DrivingModel<float> a(ModelConfig::toy(kind), 42);
    DrivingModel<float> b(ModelConfig::toy(kind), 42);
    const auto in = toy_input<float>(a.config(), rng);
    EXPECT_EQ(a.predict(in.view()).steering_deg, b.predict(in.view()).steering_deg);
  }
}

TEST(DrivingModel, HeadsPresentPerKind)
{
  std::mt19937_64 rng(6);
  for (auto kind : kKinds) {
    DrivingModel<double> m(ModelConfig::toy(kind), 1);
    const auto p = m.predict(toy_input<double>(m.config(), rng).view());
    EXPECT_EQ(p.speed_mps.has_value(), kind == ModelKind::Mmmt);
    EXPECT_EQ(p.command_logits.has_value(), kind == ModelKind::Command);
    if (p.command_logits) {
      double z = 0.0;
      const double mx = std::max({(*p.command_logits)[0], (*p.command_logits)[1], (*p.command_logits)[2]});
      std::vector<double> e;
      for (double l : *p.command_logits) e.push_back(std::exp(l - mx));
      for (double v : e) z += v;
      double sum = 0.0;
      for (double v : e) sum += v / z;
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_TRUE(p.command().has_value());
    }
  }
}

TEST(DrivingModel, InputValidation)
{
  std::mt19937_64 rng(7);
  DrivingModel<double> cmd(ModelConfig::toy(ModelKind::Command), 1);
  auto in = toy_input<double>(cmd.config(), rng);
  in.frames.back() = random_tensor<double>(Shape{8, 8, 3}, rng);
  EXPECT_THROW(cmd.predict(in.view()), emvc::ShapeError);

  DrivingModel<double> mm(ModelConfig::toy(ModelKind::Mmmt), 1);
  auto min = toy_input<double>(mm.config(), rng);
  min.window.push_back(1.0);
  EXPECT_THROW(mm.predict(min.view()), emvc::ShapeError);
  min.window.pop_back();
  min.window[0] = -1.0;
  EXPECT_THROW(mm.predict(min.view()), emvc::ValueError);

  ModelInput<double> empty;
  EXPECT_THROW(mm.predict(empty), emvc::ValueError);
}

// Steering never reads the speed branch.
TEST(DrivingModel, MmmtSteeringIgnoresFeedbackWindow)
{
  std::mt19937_64 rng(8);
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Mmmt), 9);
  auto in = toy_input<float>(m.config(), rng);
  const auto ref = m.predict(in.view());
  std::uniform_real_distribution<double> u(0.0, 40.0);
  bool speed_moved = false;
  for (int rep = 0; rep < 50; ++rep) {
    for (auto & v : in.window) v = u(rng);
    const auto p = m.predict(in.view());
    EXPECT_EQ(p.steering_deg, ref.steering_deg);
    speed_moved = speed_moved || *p.speed_mps != *ref.speed_mps;
  }
  EXPECT_TRUE(speed_moved);
}

TEST(DrivingModel, CommandNetSequenceSemantics)
{
  std::mt19937_64 rng(9);
  DrivingModel<double> m(ModelConfig::toy(ModelKind::Command), 4);
  auto in = toy_input<double>(m.config(), rng);
  const auto ordered = m.predict(in.view());
  std::swap(in.frames[0], in.frames[1]);
  EXPECT_NE(m.predict(in.view()).steering_deg, ordered.steering_deg);
  in.frames.resize(1);
  EXPECT_TRUE(std::isfinite(m.predict(in.view()).steering_deg));
}

Heads constant_heads(Graph<double> & g, double steer, double speed)
{
  Heads h;
  h.steering = g.constant(Tensor<double>::vector({steer}));
  h.speed = g.constant(Tensor<double>::vector({speed}));
  return h;
}

TEST(CompositeLoss, HandArithmetic)
{
  Graph<double> g;
  std::vector<Heads> heads = {constant_heads(g, 2.0, 10.5)};
  std::vector<LossTarget> targets(1);
  targets[0].speed_mps = 10.0;
  const auto l = composite_loss<double>(g, ModelKind::Mmmt, heads, targets, 1.0);
  EXPECT_DOUBLE_EQ(g.value(l.total)[0], 2.5);
  const auto l0 = composite_loss<double>(g, ModelKind::Mmmt, heads, targets, 0.0);
  EXPECT_EQ(g.value(l0.total)[0], g.value(l0.angle)[0]);

  std::vector<Heads> perfect = {constant_heads(g, 0.0, 10.0)};
  const auto lp = composite_loss<double>(g, ModelKind::Mmmt, perfect, targets, 1.0);
  EXPECT_EQ(g.value(lp.total)[0], 0.0);
}

TEST(CompositeLoss, MissingHeadsRejected)
{
  Graph<double> g;
  Heads h;
  h.steering = g.constant(Tensor<double>::vector({0.0}));
  std::vector<Heads> heads = {h};
  std::vector<LossTarget> targets(1);
  EXPECT_THROW(composite_loss<double>(g, ModelKind::Mmmt, heads, targets, 1.0), emvc::ValueError);
  EXPECT_THROW(composite_loss<double>(g, ModelKind::Command, heads, targets, 1.0), emvc::ValueError);
}

TEST(CompositeLoss, SecondTermScalesLinearly)
{
  std::mt19937_64 rng(10);
  for (auto kind : {ModelKind::Command, ModelKind::Mmmt}) {
    DrivingModel<double> m(ModelConfig::toy(kind), 2);
    const auto a = toy_input<double>(m.config(), rng);
    const auto b = toy_input<double>(m.config(), rng);
    Graph<double> g;
    std::vector<Heads> heads = {m.forward(g, a.view()), m.forward(g, b.view())};
    std::vector<LossTarget> t(2);
    t[0] = {3.0, 1.6, 12.0, emvc::SpeedCommand::Accelerate};
    t[1] = {-7.0, 2.4, 4.0, emvc::SpeedCommand::Maintain};
    const double base = g.value(composite_loss<double>(g, kind, heads, t, 0.0).total)[0];
    for (double lambda : {0.25, 0.5, 1.0, 3.0}) {
      const auto l = composite_loss<double>(g, kind, heads, t, lambda);
      EXPECT_NEAR(g.value(l.total)[0] - base, lambda * g.value(l.second)[0], 1e-12);
    }
  }
}

TEST(Checkpoint, RoundTripIdenticalOutputs)
{
  std::mt19937_64 rng(12);
  for (auto kind : kKinds) {
    DrivingModel<float> m(ModelConfig::toy(kind), 77);
    const auto bytes = emvc::models::save_checkpoint(m);
    const auto loaded = emvc::models::load_checkpoint<float>(bytes);
    EXPECT_TRUE(loaded.warnings.empty());
    for (int rep = 0; rep < 10; ++rep) {
      const auto in = toy_input<float>(m.config(), rng);
      const auto p = m.predict(in.view());
      const auto q = loaded.model.predict(in.view());
      EXPECT_EQ(p.steering_deg, q.steering_deg);
      EXPECT_EQ(p.speed_mps, q.speed_mps);
      EXPECT_EQ(p.command_logits, q.command_logits);
    }
    EXPECT_EQ(emvc::models::save_checkpoint(loaded.model), bytes);
  }
}

TEST(Checkpoint, TruncatedAndCorruptRejected)
{
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Mmmt), 1);
  const auto bytes = emvc::models::save_checkpoint(m);
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, bytes.size() / 2, bytes.size() - 1})
    EXPECT_THROW(emvc::models::load_checkpoint<float>(bytes.substr(0, cut)), emvc::FormatError);
  EXPECT_THROW(emvc::models::load_checkpoint<float>(bytes + "x"), emvc::FormatError);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(emvc::models::load_checkpoint<float>(bad), emvc::FormatError);
}

TEST(Checkpoint, ArchitectureMismatchAndOverrides)
{
  DrivingModel<float> m(ModelConfig::toy(ModelKind::Mmmt), 1);
  const auto bytes = emvc::models::save_checkpoint(m);
  auto other = ModelConfig::toy(ModelKind::Base);
  EXPECT_THROW(emvc::models::load_checkpoint<float>(bytes, &other), emvc::ConfigError);

  auto tweaked = ModelConfig::toy(ModelKind::Mmmt);
  tweaked.task_weight = 0.7;
  const auto loaded = emvc::models::load_checkpoint<float>(bytes, &tweaked);
  ASSERT_EQ(loaded.warnings.size(), 1u);
  EXPECT_NE(loaded.warnings[0].find("model.task_weight"), std::string::npos);
  EXPECT_DOUBLE_EQ(loaded.model.config().task_weight, 0.7);
}

}  // namespace
