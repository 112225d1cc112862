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

#ifndef EMVC__TRAINING__TRAINER_HPP_
#define EMVC__TRAINING__TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "emvc/autodiff/optimizer.hpp"
#include "emvc/datapipe/augment.hpp"
#include "emvc/datapipe/shard.hpp"
#include "emvc/models/driving_model.hpp"
#include "emvc/training/evaluate.hpp"

namespace emvc::training
{

struct TrainOptions
{
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  // Hard cap on optimizer steps over the whole run; 0 means none.
  std::size_t max_steps = 0;
  autodiff::OptimizerConfig optimizer{autodiff::OptimizerConfig::Kind::Adam, 1e-3, 0.9, 0.999, 1e-8};
  // Cosine decay from the base rate to base * lr_final_fraction over the run.
  double lr_final_fraction = 1.0;
  std::uint64_t seed = 1;
  bool augment = true;
  datapipe::AugmentOptions augment_options;
  double speed_noise_sigma = 0.2;
  // Examples used to report train metrics each epoch; 0 means all.
  std::size_t train_eval_limit = 0;
  double low_speed_cutoff_mps = 4.0;
};

struct EpochLog
{
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double train_loss = 0.0;
  EvalMetrics train;
  std::optional<EvalMetrics> val;

  std::string format() const;
};

// Everything needed to continue a run exactly where it stopped.
struct TrainState
{
  std::size_t epoch = 0;
  std::size_t steps = 0;
  std::string rng_state;
  std::string optimizer_state;
  std::string model_checkpoint;
  std::string best_checkpoint;
  double best_val = 0.0;
  bool has_best = false;
  std::vector<std::string> log;

  std::string encode() const;
  static TrainState decode(std::string_view bytes);
};

struct TrainResult
{
  std::vector<EpochLog> epochs;
  std::string best_checkpoint;
  std::size_t steps = 0;
};

class Trainer
{
public:
  Trainer(models::DrivingModel<float> & model, TrainOptions options);

  // Restores model, optimizer, rng and counters from a saved state.
  void resume(const TrainState & state);

  // Runs epochs until `options.epochs` (or max_steps) is reached, or until
  // `stop_after_epoch` epochs have completed in this call. `on_epoch` sees the
  // state after every epoch (for checkpointing).
  TrainResult run(
    const datapipe::Shard & train, const datapipe::Shard * val,
    const std::function<void(const EpochLog &, const TrainState &)> & on_epoch = {},
    std::optional<std::size_t> stop_after_epoch = std::nullopt);

  // One optimizer step on the given examples; returns the batch loss.
  double train_step(const datapipe::Shard & shard, const std::vector<std::size_t> & batch);

  const TrainState & state() const { return state_; }

private:
  double learning_rate_at(std::size_t step, std::size_t total) const;

  models::DrivingModel<float> & model_;
  TrainOptions options_;
  autodiff::Optimizer<float> optimizer_;
  std::mt19937_64 rng_;
  TrainState state_;
};

}  // namespace emvc::training

#endif  // EMVC__TRAINING__TRAINER_HPP_
