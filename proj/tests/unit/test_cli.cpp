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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "emvc/cli/commands.hpp"
#include "emvc/cli/gradcheck_suite.hpp"
#include "emvc/cli/run_config.hpp"
#include "emvc/common/error.hpp"
#include "emvc/datapipe/manifest.hpp"
#include "emvc/datapipe/shard.hpp"

namespace
{

namespace cli = emvc::cli;
namespace fs = std::filesystem;
using emvc::models::ModelKind;

TEST(RunConfig, DefaultsOverridesAndUnknownKeys)
{
  cli::RunConfig c;
  EXPECT_EQ(c.get("model.kind"), "mmmt");
  EXPECT_DOUBLE_EQ(c.model_config().task_weight, 1.0);
  c.apply_override("model.kind=command");
  EXPECT_EQ(c.model_config().kind, ModelKind::Command);
  EXPECT_DOUBLE_EQ(c.model_config().task_weight, 0.5);
  c.set("model.task_weight", "0.25");
  EXPECT_DOUBLE_EQ(c.model_config().task_weight, 0.25);
  EXPECT_THROW(c.set("model.colour", "red"), emvc::ConfigError);
  EXPECT_THROW(c.apply_override("no-equals-sign"), emvc::ConfigError);
  EXPECT_THROW(cli::RunConfig::parse("train.epochs = 3\nbogus.key = 1\n"), emvc::ConfigError);
}

TEST(RunConfig, HashFollowsContent)
{
  const auto a = cli::RunConfig::parse("train.epochs = 3\n");
  const auto b = cli::RunConfig::parse("# comment\ntrain.epochs = 3\n");
  const auto c = cli::RunConfig::parse("train.epochs = 4\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash_hex().size(), 16u);
}

TEST(RunConfig, SeedLists)
{
  EXPECT_EQ(cli::parse_seed_list("k", "1-3,7"), (std::vector<std::uint64_t>{1, 2, 3, 7}));
  EXPECT_THROW(cli::parse_seed_list("k", "3-1"), emvc::ConfigError);
  EXPECT_THROW(cli::parse_seed_list("k", "x"), emvc::ConfigError);
}

TEST(GradcheckSuite, StockPassesAndFaultFails)
{
  cli::GradcheckSuiteOptions o;
  const auto rows = cli::run_gradcheck_suite(o);
  ASSERT_FALSE(rows.empty());
  for (const auto & r : rows) {
    EXPECT_TRUE(r.passed) << r.name << " " << r.max_rel_error;
    EXPECT_GT(r.checked, 0u);
  }
  o.fault = emvc::autodiff::BackwardFault::ConvWeightSignFlip;
  bool conv_failed = false;
  for (const auto & r : cli::run_gradcheck_suite(o))
    if (r.name.find("conv") != std::string::npos) conv_failed = conv_failed || !r.passed;
  EXPECT_TRUE(conv_failed);
}

int run(const std::vector<std::string> & args, std::string * out = nullptr)
{
  std::ostringstream o, e;
  const int rc = cli::run_cli(args, o, e);
  if (out) *out = o.str() + e.str();
  return rc;
}

TEST(Cli, ExitCodes)
{
  std::string text;
  EXPECT_EQ(run({"gradcheck"}, &text), cli::kExitOk);
  EXPECT_NE(text.find("conv2d"), std::string::npos);
  EXPECT_EQ(run({"gradcheck", "--inject-conv-fault"}), cli::kExitAcceptance);
  EXPECT_EQ(run({"-s", "unknown.key=1", "gradcheck"}), cli::kExitConfig);
  EXPECT_EQ(run({"nonsense"}), cli::kExitConfig);
  EXPECT_EQ(run({"-c", "/nonexistent/emvc.cfg", "gradcheck"}), cli::kExitConfig);
}

std::string read_all(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the stages in a scratch directory so the relative default paths land there.
class Pipeline : public ::testing::Test
{
protected:
  void SetUp() override
  {
    old_ = fs::current_path();
    dir_ = fs::temp_directory_path() / "emvc_cli_pipeline";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    fs::current_path(dir_);
    std::ofstream(dir_ / "tiny.cfg") << "data.road_seeds = 1-3\n"
                                        "data.n_frames = 270\n"
                                        "data.render_side = 32\n"
                                        "prep.split = 0.34,0.33,0.33\n"
                                        "model.input_side = 16\n"
                                        "model.conv = 3/1/4,3/2/5,3/1/6,2/1/6\n"
                                        "model.fc = 12,8,6\n"
                                        "model.speed_window = 4\n"
                                        "model.speed_encoder = 6,5\n"
                                        "model.speed_head_hidden = 4\n"
                                        "train.epochs = 2\n"
                                        "train.batch_size = 8\n"
                                        "drive.duration_s = 4\n";
  }
  void TearDown() override
  {
    fs::current_path(old_);
    fs::remove_all(dir_);
  }

  fs::path old_, dir_;
};

TEST_F(Pipeline, StagesProduceArtifacts)
{
  const std::vector<std::string> base = {"-c", "tiny.cfg"};
  auto with = [&](std::vector<std::string> rest) {
    auto a = base;
    a.insert(a.end(), rest.begin(), rest.end());
    return a;
  };
  ASSERT_EQ(run(with({"datagen"})), cli::kExitOk);
  EXPECT_EQ(emvc::datapipe::load_manifest("data/manifest.csv").size(), 3u * 270u);
  ASSERT_EQ(run(with({"prep"})), cli::kExitOk);
  for (const char * s : {"train", "val", "test"}) EXPECT_TRUE(fs::exists(fs::path("shards") / (std::string(s) + ".shard")));
  EXPECT_NE(read_all("shards/prep_report.txt").find("accelerate="), std::string::npos);

  ASSERT_EQ(run(with({"train"})), cli::kExitOk);
  for (const char * f : {"best.ckpt", "last.ckpt", "metrics.log", "train_state.bin", "config.txt"})
    EXPECT_TRUE(fs::exists(fs::path("run") / f)) << f;
  EXPECT_NE(read_all("run/metrics.log").find("epoch=2"), std::string::npos);

  std::string text;
  ASSERT_EQ(run(with({"eval"}), &text), cli::kExitOk);
  EXPECT_NE(read_all("eval/metrics.txt").find("angle_mae_deg="), std::string::npos);

  ASSERT_EQ(run(with({"drive", "--perturb", "1:0.3"})), cli::kExitOk);
  EXPECT_NE(read_all("drive/episode.csv").find("t,cte"), std::string::npos);
  ASSERT_EQ(run(with({"drive", "--oracle", "--out", "oracle"})), cli::kExitOk);
  EXPECT_NE(read_all("oracle/summary.txt").find("off_road=false"), std::string::npos);

  // A different model config cannot resume this run.
  EXPECT_EQ(run(with({"-s", "model.fc=12,8,7", "train", "--resume"})), cli::kExitConfig);
}

TEST_F(Pipeline, EmptyDatagenAndMissingImages)
{
  ASSERT_EQ(run({"-c", "tiny.cfg", "-s", "data.n_frames=0", "datagen"}), cli::kExitOk);
  EXPECT_EQ(read_all("data/manifest.csv"), std::string(emvc::datapipe::kManifestHeader) + "\n");

  std::ofstream("data/manifest.csv") << emvc::datapipe::kManifestHeader << "\n"
                                     << "0.0,t1,center,gone.ppm,0,10\n"
                                     << "0.0,t2,center,gone2.ppm,0,10\n"
                                     << "0.0,t3,center,gone3.ppm,0,10\n";
  std::string text;
  EXPECT_EQ(run({"-c", "tiny.cfg", "prep"}, &text), cli::kExitFailure);
  EXPECT_NE(text.find("gone.ppm"), std::string::npos);
}

TEST_F(Pipeline, ResumeMatchesSingleRun)
{
  const std::vector<std::string> base = {"-c", "tiny.cfg", "-s", "model.kind=base"};
  auto with = [&](std::vector<std::string> rest) {
    auto a = base;
    a.insert(a.end(), rest.begin(), rest.end());
    return a;
  };
  ASSERT_EQ(run(with({"datagen"})), cli::kExitOk);
  ASSERT_EQ(run(with({"prep"})), cli::kExitOk);
  ASSERT_EQ(run(with({"train"})), cli::kExitOk);
  const auto straight = read_all("run/last.ckpt");
  const auto log = read_all("run/metrics.log");
  fs::remove_all("run");
  ASSERT_EQ(run(with({"train", "--stop-after-epochs", "1"})), cli::kExitOk);
  ASSERT_EQ(run(with({"train", "--resume"})), cli::kExitOk);
  EXPECT_EQ(read_all("run/last.ckpt"), straight);
  EXPECT_EQ(read_all("run/metrics.log"), log);
}

}  // namespace
