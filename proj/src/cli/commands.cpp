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

#include "emvc/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "emvc/cli/gradcheck_suite.hpp"
#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"
#include "emvc/datapipe/manifest.hpp"
#include "emvc/datapipe/prep.hpp"
#include "emvc/models/checkpoint.hpp"
#include "emvc/simworld/dataset.hpp"
#include "emvc/simworld/episode.hpp"
#include "emvc/training/evaluate.hpp"
#include "emvc/training/trainer.hpp"

namespace emvc::cli
{

namespace fs = std::filesystem;

namespace
{

bool is_path_key(const std::string & key)
{
  for (const char * suffix : {"out_dir", "manifest", "data_dir", "checkpoint", "shard"}) {
    const std::string s(suffix);
    if (key.size() >= s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0) return true;
  }
  return false;
}

std::string with_hash(const std::string & text)
{
  return "# config_hash = " + hex64(fnv1a64(text)) + "\n" + text;
}

const std::vector<std::string> kDataSections = {"data.", "road.", "oracle.", "camera.", "vehicle."};

std::vector<std::string> prep_sections()
{
  auto v = kDataSections;
  for (const char * k : {"prep.", "model.input_side", "model.speed_window", "model.sequence_length",
                         "model.sequence_stride"})
    v.emplace_back(k);
  return v;
}

}  // namespace

std::string stage_fingerprint(const RunConfig & config, const std::vector<std::string> & prefixes)
{
  const auto all = KeyValueText::parse(config.section_text(prefixes));
  KeyValueText out;
  for (const auto & [k, v] : all.entries())
    if (!is_path_key(k)) out.set(k, v);
  return out.serialize();
}

int cmd_datagen(const RunConfig & config, std::ostream & out)
{
  const auto options = config.dataset_options();
  const fs::path dir = config.get("data.out_dir");
  const auto rows = simworld::gen_dataset(options, dir);
  const std::string text = stage_fingerprint(config, kDataSections);
  write_file(dir / "dataset_config.txt", with_hash(text));
  out << "datagen: " << rows.size() << " manifest rows (" << options.road_seeds.size() << " trips, "
      << options.n_frames << " frames per camera) -> " << (dir / "manifest.csv").string() << "\n";
  out << "config_hash " << hex64(fnv1a64(text)) << "\n";
  return kExitOk;
}

int cmd_prep(const RunConfig & config, std::ostream & out)
{
  const auto prep = config.prep_config();
  const fs::path manifest = config.get("prep.manifest");
  const fs::path dir = config.get("prep.out_dir");
  const auto samples = datapipe::load_manifest(manifest);
  const std::string text = stage_fingerprint(config, prep_sections());
  const auto result = datapipe::prepare_dataset(samples, manifest.parent_path(), prep, text, fnv1a64(text));

  const char * names[3] = {"train", "val", "test"};
  for (std::size_t k = 0; k < 3; ++k)
    datapipe::write_shard(dir / (std::string(names[k]) + ".shard"), result.shards[k]);

  std::ostringstream report;
  report << "config_hash " << hex64(fnv1a64(text)) << "\n";
  const std::vector<std::string> * trips[3] = {&result.split.train, &result.split.val, &result.split.test};
  for (std::size_t k = 0; k < 3; ++k) {
    report << names[k] << " trips:";
    for (const auto & t : *trips[k]) report << " " << t;
    report << "\n" << names[k] << " examples: " << result.shards[k].examples.size()
           << " frames: " << result.shards[k].frames.size() << "\n";
  }
  std::size_t total = 0;
  for (auto c : result.histogram) total += c;
  report << "command histogram:";
  char buf[64];
  for (std::size_t c = 0; c < kNumSpeedCommands; ++c) {
    const double frac = total ? static_cast<double>(result.histogram[c]) / static_cast<double>(total) : 0.0;
    std::snprintf(buf, sizeof buf, " %s=%zu (%.4f)", std::string(command_name(command_from_index(c))).c_str(),
                  result.histogram[c], frac);
    report << buf;
  }
  report << "\nskipped: unlabeled=" << result.skipped_unlabeled << " low_speed=" << result.skipped_low_speed
         << " synthesis=" << result.skipped_synthesis << "\n";
  write_file(dir / "prep_report.txt", report.str());
  out << report.str();
  return kExitOk;
}

int cmd_train(const RunConfig & config, const TrainFlags & flags, std::ostream & out)
{
  const auto model_cfg = config.model_config();
  const auto options = config.train_options();
  const fs::path data = config.get("train.data_dir");
  const fs::path dir = config.get("train.out_dir");
  const auto train = datapipe::read_shard(data / "train.shard");
  std::optional<datapipe::Shard> val;
  if (fs::exists(data / "val.shard")) val = datapipe::read_shard(data / "val.shard");
  training::check_compatible(model_cfg, train.header);

  const std::string text = stage_fingerprint(config, {"model.", "train.", "prep.", "data.", "road.", "oracle.",
                                                      "camera.", "vehicle."});
  const std::string hash = hex64(fnv1a64(text));
  const fs::path state_path = dir / "train_state.bin";

  models::DrivingModel<float> model(model_cfg, options.seed);
  training::Trainer trainer(model, options);
  if (flags.resume && fs::exists(state_path)) {
    const std::string saved = read_file(dir / "config.txt");
    if (saved != with_hash(text))
      throw ConfigError("cannot resume: " + (dir / "config.txt").string() + " differs from the current config");
    trainer.resume(training::TrainState::decode(read_file(state_path)));
    out << "resumed at epoch " << trainer.state().epoch << " step " << trainer.state().steps << "\n";
  } else {
    write_file(dir / "config.txt", with_hash(text));
  }

  out << "train: " << models::model_kind_name(model_cfg.kind) << " params="
      << model.parameters().total_elements() << " examples=" << train.examples.size()
      << " config_hash " << hash << "\n";
  auto write_log = [&](const training::TrainState & st) {
    std::string log = "config_hash " + hash + "\n";
    for (const auto & l : st.log) log += l + "\n";
    write_file(dir / "metrics.log", log);
  };
  const auto result = trainer.run(
    train, val ? &*val : nullptr,
    [&](const training::EpochLog & log, const training::TrainState & st) {
      out << log.format() << "\n" << std::flush;
      write_file(state_path, st.encode());
      write_file(dir / "last.ckpt", st.model_checkpoint);
      write_file(dir / "best.ckpt", st.best_checkpoint);
      write_log(st);
    },
    flags.stop_after_epochs);
  if (result.epochs.empty()) write_log(trainer.state());
  if (!fs::exists(dir / "best.ckpt")) write_file(dir / "best.ckpt", result.best_checkpoint);
  out << "best checkpoint: " << (dir / "best.ckpt").string() << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig & config, std::ostream & out)
{
  const auto loaded = models::load_checkpoint<float>(read_file(config.get("eval.checkpoint")));
  for (const auto & w : loaded.warnings) out << "warning: " << w << "\n";
  const auto shard = datapipe::read_shard(config.get("eval.shard"));
  training::check_compatible(loaded.model.config(), shard.header);
  const auto metrics = training::evaluate(
    shard, training::model_predictor(loaded.model), config.get_double("prep.low_speed_cutoff_mps"));
  const std::string text = config.text();
  std::string report = "model " + models::model_kind_name(loaded.model.kind()) + "\n" + metrics.format() + "\n";
  write_file(fs::path(config.get("eval.out_dir")) / "metrics.txt",
             "# config_hash = " + hex64(fnv1a64(text)) + "\n" + report);
  out << report;
  return kExitOk;
}

int cmd_drive(const RunConfig & config, std::ostream & out)
{
  auto options = config.episode_options();
  const auto data = config.dataset_options();
  const double top = std::max(data.oracle.v_max_mps, config.get_double("control.v_max_mps"));
  const simworld::Road road = simworld::gen_road(
    static_cast<std::uint64_t>(config.get_size("drive.road_seed")),
    options.duration_s * top + 2.0 * data.camera.max_range_m + 50.0, data.road);
  options.initial_speed_mps = simworld::OracleDriver(road, data.oracle, data.vehicle).target_speed(0.0);

  simworld::EpisodeReport report;
  if (config.get_bool("drive.oracle")) {
    simworld::OracleController controller(road, data.oracle, data.vehicle);
    report = simworld::run_episode(road, controller, options);
  } else {
    const auto loaded = models::load_checkpoint<float>(read_file(config.get("drive.checkpoint")));
    for (const auto & w : loaded.warnings) out << "warning: " << w << "\n";
    if (loaded.model.config().input_side != config.model_config().input_side)
      out << "note: checkpoint input side " << loaded.model.config().input_side << " overrides model.input_side\n";
    simworld::ModelController controller(loaded.model, *options.initial_speed_mps, config.controller_options());
    report = simworld::run_episode(road, controller, options);
  }
  const fs::path dir = config.get("drive.out_dir");
  write_file(dir / "episode.csv", report.to_csv());
  const std::string summary = report.summary();
  write_file(dir / "summary.txt", "config_hash " + config.hash_hex() + "\n" + summary + "\n");
  out << summary << "\n";
  return report.off_road ? kExitAcceptance : kExitOk;
}

int cmd_gradcheck(const RunConfig & config, const GradcheckFlags & flags, std::ostream & out)
{
  GradcheckSuiteOptions o;
  o.tolerance = config.get_double("gradcheck.tolerance");
  o.samples_per_tensor = config.get_size("gradcheck.samples_per_tensor");
  o.seed = static_cast<std::uint64_t>(config.get_size("gradcheck.seed"));
  o.fault = flags.fault;
  const auto rows = run_gradcheck_suite(o);
  bool ok = true;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-28s %14s %8s %8s  %s\n", "check", "max_rel_error", "checked", "kinks", "result");
  out << buf;
  for (const auto & r : rows) {
    std::snprintf(buf, sizeof buf, "%-28s %14.3e %8zu %8zu  %s%s\n", r.name.c_str(), r.max_rel_error, r.checked,
                  r.skipped_nonsmooth, r.passed ? "pass" : "FAIL",
                  r.passed ? "" : (" (worst " + r.worst_tensor + ")").c_str());
    out << buf;
    ok = ok && r.passed;
  }
  out << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (tolerance " << o.tolerance << ")\n";
  return ok ? kExitOk : kExitAcceptance;
}

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"emvc: end-to-end driving models, data pipeline and simulator"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_option("-s,--set", overrides, "override a config key (key=value)")->take_all();

  auto * datagen = app.add_subcommand("datagen", "render a synthetic dataset");
  auto * prep = app.add_subcommand("prep", "label, filter, synthesize and shard a manifest");
  auto * train = app.add_subcommand("train", "train a model on shards");
  auto * eval = app.add_subcommand("eval", "score a checkpoint on a shard");
  auto * drive = app.add_subcommand("drive", "closed-loop episode in the simulator");
  auto * gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");

  TrainFlags train_flags;
  std::size_t stop_after = 0;
  train->add_flag("--resume", train_flags.resume, "continue from train_state.bin");
  train->add_option("--stop-after-epochs", stop_after, "stop after N epochs in this run");

  std::string checkpoint, shard, perturb, out_dir;
  bool oracle = false;
  eval->add_option("--checkpoint", checkpoint);
  eval->add_option("--shard", shard);
  drive->add_option("--checkpoint", checkpoint);
  drive->add_option("--perturb", perturb, "time:offset, e.g. 5:0.3");
  drive->add_flag("--oracle", oracle, "bypass the model");
  drive->add_option("--out", out_dir);

  bool inject = false;
  gradcheck->add_flag("--inject-conv-fault", inject)->group("");

  // CLI11 wants argv order without the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
    for (const auto & o : overrides) config.apply_override(o);
    if (!checkpoint.empty()) config.set(*eval ? "eval.checkpoint" : "drive.checkpoint", checkpoint);
    if (!shard.empty()) config.set("eval.shard", shard);
    if (!perturb.empty()) config.set("drive.perturb", perturb);
    if (oracle) config.set("drive.oracle", "true");
    if (!out_dir.empty()) config.set("drive.out_dir", out_dir);
    if (stop_after > 0) train_flags.stop_after_epochs = stop_after;

    if (*datagen) return cmd_datagen(config, out);
    if (*prep) return cmd_prep(config, out);
    if (*train) return cmd_train(config, train_flags, out);
    if (*eval) return cmd_eval(config, out);
    if (*drive) return cmd_drive(config, out);
    if (*gradcheck) {
      GradcheckFlags f;
      if (inject) f.fault = autodiff::BackwardFault::ConvWeightSignFlip;
      return cmd_gradcheck(config, f, out);
    }
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace emvc::cli
