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

#include "emvc/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"
#include "emvc/datapipe/labeling.hpp"
#include "emvc/models/checkpoint.hpp"

namespace emvc::training
{

namespace
{

constexpr std::string_view kStateMagic = "EMVCTRST";
constexpr std::uint32_t kStateVersion = 1;

}  // namespace

std::string EpochLog::format() const
{
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch=%zu steps=%zu train_loss=%.6f train_angle_mae_deg=%.6f", epoch,
                steps, train_loss, train.angle_mae_deg);
  std::string out = buf;
  if (train.speed_mae_mps) {
    std::snprintf(buf, sizeof buf, " train_speed_mae_mps=%.6f", *train.speed_mae_mps);
    out += buf;
  }
  if (train.command_accuracy) {
    std::snprintf(buf, sizeof buf, " train_command_accuracy=%.6f", *train.command_accuracy);
    out += buf;
  }
  if (val) {
    std::snprintf(buf, sizeof buf, " val_angle_mae_deg=%.6f", val->angle_mae_deg);
    out += buf;
    if (val->speed_mae_mps) {
      std::snprintf(buf, sizeof buf, " val_speed_mae_mps=%.6f", *val->speed_mae_mps);
      out += buf;
    }
    if (val->command_accuracy) {
      std::snprintf(buf, sizeof buf, " val_command_accuracy=%.6f", *val->command_accuracy);
      out += buf;
    }
  }
  return out;
}

std::string TrainState::encode() const
{
  ByteWriter out;
  out.put_bytes(kStateMagic);
  out.put_u32(kStateVersion);
  out.put_u64(epoch);
  out.put_u64(steps);
  out.put_string(rng_state);
  out.put_string(optimizer_state);
  out.put_string(model_checkpoint);
  out.put_string(best_checkpoint);
  out.put_f64(best_val);
  out.put_u8(has_best ? 1 : 0);
  out.put_u32(static_cast<std::uint32_t>(log.size()));
  for (const auto & l : log) out.put_string(l);
  return out.take();
}

TrainState TrainState::decode(std::string_view bytes)
{
  ByteReader in(bytes);
  if (in.remaining() < kStateMagic.size() || in.get_bytes(kStateMagic.size()) != kStateMagic)
    throw FormatError("train state: bad magic");
  if (in.get_u32() != kStateVersion) throw FormatError("train state: unsupported version");
  TrainState s;
  s.epoch = in.get_u64();
  s.steps = in.get_u64();
  s.rng_state = in.get_string();
  s.optimizer_state = in.get_string();
  s.model_checkpoint = in.get_string();
  s.best_checkpoint = in.get_string();
  s.best_val = in.get_f64();
  s.has_best = in.get_u8() != 0;
  const auto n = in.get_u32();
  for (std::uint32_t i = 0; i < n; ++i) s.log.push_back(in.get_string());
  if (!in.at_end()) throw FormatError("train state: trailing bytes");
  return s;
}

Trainer::Trainer(models::DrivingModel<float> & model, TrainOptions options)
    : model_(model), options_(options), optimizer_(options.optimizer), rng_(options.seed)
{
  if (options_.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(options_.optimizer.learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(options_.lr_final_fraction > 0.0 && options_.lr_final_fraction <= 1.0))
    throw ConfigError("lr_final_fraction must be in (0, 1]");
}

void Trainer::resume(const TrainState & state)
{
  const auto loaded = models::load_checkpoint<float>(state.model_checkpoint, &model_.config());
  auto src = loaded.model.parameters().begin();
  for (auto & e : model_.parameters()) {
    e.tensor.storage() = src->tensor.storage();
    ++src;
  }
  ByteReader opt(state.optimizer_state);
  optimizer_.load_state(opt, model_.parameters());
  std::istringstream rs(state.rng_state);
  rs >> rng_;
  if (rs.fail()) throw FormatError("train state: bad rng state");
  state_ = state;
}

double Trainer::learning_rate_at(std::size_t step, std::size_t total) const
{
  const double base = options_.optimizer.learning_rate;
  if (options_.lr_final_fraction >= 1.0 || total <= 1) return base;
  const double p = std::min(1.0, static_cast<double>(step) / static_cast<double>(total - 1));
  const double f = options_.lr_final_fraction;
  return base * (f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * p)));
}

double Trainer::train_step(const datapipe::Shard & shard, const std::vector<std::size_t> & batch)
{
  const auto & cfg = model_.config();
  autodiff::Graph<float> g;
  std::vector<models::Heads> heads;
  std::vector<models::LossTarget> targets;
  std::vector<autodiff::Tensor<float>> frames;
  for (const std::size_t idx : batch) {
    const auto & e = shard.examples.at(idx);
    auto input = example_input(model_, shard, e, frames);
    double steering = e.steering_deg;
    if (options_.augment) {
      const auto a = datapipe::draw_augmentation(rng_, options_.augment_options);
      // One draw per example so a sequence is transformed consistently.
      double unused = 0.0;
      for (std::size_t f = 0; f < frames.size(); ++f)
        datapipe::apply_augmentation(a, frames[f], f + 1 == frames.size() ? steering : unused);
    }
    if (cfg.kind == models::ModelKind::Mmmt && options_.speed_noise_sigma > 0.0)
      input.speed_window = datapipe::synthesize_speed_noise(input.speed_window, rng_, options_.speed_noise_sigma);
    heads.push_back(model_.forward(g, input));
    models::LossTarget t;
    t.steering_deg = steering;
    t.weight = models::sample_weight(steering, cfg.angle_weight_beta_deg, cfg.angle_weight_cap);
    t.speed_mps = e.next_speed_mps;
    t.command = e.command;
    targets.push_back(t);
  }
  const auto loss = models::composite_loss<float>(g, cfg.kind, heads, targets, cfg.task_weight);
  model_.parameters().zero_grad();
  g.backward(loss.total);
  optimizer_.step(model_.parameters());
  return static_cast<double>(g.value(loss.total).item());
}

TrainResult Trainer::run(
  const datapipe::Shard & train, const datapipe::Shard * val,
  const std::function<void(const EpochLog &, const TrainState &)> & on_epoch,
  std::optional<std::size_t> stop_after_epoch)
{
  check_compatible(model_.config(), train.header);
  if (val != nullptr) check_compatible(model_.config(), val->header);
  const std::size_t n = train.examples.size();
  if (n == 0) throw ValueError("training shard has no examples");
  const std::size_t per_epoch = (n + options_.batch_size - 1) / options_.batch_size;
  std::size_t total = per_epoch * options_.epochs;
  if (options_.max_steps > 0) total = std::min(total, options_.max_steps);

  // Train metrics use a fixed prefix of the shard without augmentation.
  datapipe::Shard train_eval_view;
  const datapipe::Shard * train_eval = &train;
  if (options_.train_eval_limit > 0 && options_.train_eval_limit < n) {
    train_eval_view.header = train.header;
    train_eval_view.frames = train.frames;
    train_eval_view.examples.assign(
      train.examples.begin(), train.examples.begin() + static_cast<std::ptrdiff_t>(options_.train_eval_limit));
    train_eval = &train_eval_view;
  }

  TrainResult result;
  std::size_t epochs_this_call = 0;
  while (state_.epoch < options_.epochs && state_.steps < total) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n && state_.steps < total; start += options_.batch_size) {
      const std::vector<std::size_t> batch(
        order.begin() + static_cast<std::ptrdiff_t>(start),
        order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + options_.batch_size)));
      optimizer_.set_learning_rate(learning_rate_at(state_.steps, total));
      loss_sum += train_step(train, batch);
      ++batches;
      ++state_.steps;
    }
    ++state_.epoch;
    ++epochs_this_call;

    EpochLog log;
    log.epoch = state_.epoch;
    log.steps = state_.steps;
    log.train_loss = batches ? loss_sum / static_cast<double>(batches) : 0.0;
    const auto predictor = model_predictor(model_);
    log.train = evaluate(*train_eval, predictor, options_.low_speed_cutoff_mps);
    if (val != nullptr && !val->examples.empty()) log.val = evaluate(*val, predictor, options_.low_speed_cutoff_mps);
    const double score = log.val ? log.val->angle_mae_deg : log.train.angle_mae_deg;

    state_.model_checkpoint = models::save_checkpoint(model_);
    if (!state_.has_best || score < state_.best_val) {
      state_.has_best = true;
      state_.best_val = score;
      state_.best_checkpoint = state_.model_checkpoint;
    }
    ByteWriter opt;
    optimizer_.save_state(opt);
    state_.optimizer_state = opt.take();
    std::ostringstream rs;
    rs << rng_;
    state_.rng_state = rs.str();
    state_.log.push_back(log.format());
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log, state_);
    if (stop_after_epoch && epochs_this_call >= *stop_after_epoch) break;
  }
  result.best_checkpoint = state_.has_best ? state_.best_checkpoint : models::save_checkpoint(model_);
  result.steps = state_.steps;
  return result;
}

}  // namespace emvc::training
