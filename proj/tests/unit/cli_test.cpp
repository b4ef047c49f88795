// Copyright 2026 The tepolab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

namespace tepo::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome Invoke(std::vector<std::string> args, EnvLookup env = nullptr) {
  if (!env) env = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tepo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = dir_ / "small.ini";
    std::ofstream(config_) << "[training]\n"
                              "questions_per_step = 2\n"
                              "rollouts_per_question = 4\n"
                              "total_steps = 2\n"
                              "seed = 5\n"
                              "[logging]\n"
                              "trajectories = true\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  fs::path config_;
};

TEST_F(CliTest, HelpAndVersion) {
  const Outcome help = Invoke({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("train"), std::string::npos);
  EXPECT_NE(help.out.find("TEPO_TRAINING_LEARNING_RATE"), std::string::npos);
  EXPECT_EQ(Invoke({}).code, kExitInvalid);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitInvalid);
}

TEST_F(CliTest, TrainWritesManifestMetricsCheckpointAndTrajectories) {
  const fs::path out = dir_ / "run";
  const Outcome r = Invoke({"train", "--config", config_.string(), "--mode", "sparse", "--out",
                         out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
  EXPECT_TRUE(fs::exists(out / "checkpoint.bin"));
  EXPECT_TRUE(fs::exists(out / "trajectories.jsonl"));
  const auto manifest = nlohmann::json::parse(ReadFile(out / "manifest.json"));
  EXPECT_EQ(manifest["status"], "completed");
  EXPECT_EQ(manifest["config"]["training.mode"], "tepo_sparse");
  EXPECT_EQ(manifest["config"]["training.total_steps"], "2");
  // header plus one row per step
  const std::string metrics = ReadFile(out / "metrics.csv");
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 3);
}

TEST_F(CliTest, ManifestReplayIsBitIdentical) {
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  ASSERT_EQ(Invoke({"train", "--config", config_.string(), "--mode", "dense", "--out", a.string()})
                .code,
            kExitOk);
  const Outcome replay =
      Invoke({"train", "--from-manifest", (a / "manifest.json").string(), "--out", b.string()});
  ASSERT_EQ(replay.code, kExitOk) << replay.err;
  EXPECT_EQ(ReadFile(a / "metrics.csv"), ReadFile(b / "metrics.csv"));
}

TEST_F(CliTest, PrecedenceCliOverEnvOverFile) {
  const EnvLookup env = [](const std::string& name) -> std::optional<std::string> {
    if (name == "TEPO_TRAINING_TOTAL_STEPS") return "1";
    if (name == "TEPO_TRAINING_SEED") return "77";
    return std::nullopt;
  };
  const fs::path out = dir_ / "prec";
  const Outcome r = Invoke({"train", "--config", config_.string(), "--set", "training.seed=78",
                         "--out", out.string()},
                        env);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto manifest = nlohmann::json::parse(ReadFile(out / "manifest.json"));
  EXPECT_EQ(manifest["config"]["training.total_steps"], "1");
  EXPECT_EQ(manifest["config"]["training.seed"], "78");
  EXPECT_EQ(manifest["config"]["training.questions_per_step"], "2");

  const Outcome keys = Invoke({"config", "--config", config_.string(), "--set", "training.total_steps=0"}, env);
  ASSERT_EQ(keys.code, kExitOk) << keys.err;
  EXPECT_NE(keys.out.find("total_steps = 0"), std::string::npos) << keys.out;
  EXPECT_NE(keys.out.find("seed = 77"), std::string::npos) << keys.out;
}

TEST_F(CliTest, ZeroStepsStillWritesOutputs) {
  const fs::path out = dir_ / "zero";
  ASSERT_EQ(Invoke({"train", "--config", config_.string(), "--steps", "0", "--out", out.string()})
                .code,
            kExitOk);
  EXPECT_EQ(ReadFile(out / "metrics.csv").find('\n') + 1, ReadFile(out / "metrics.csv").size());
  EXPECT_TRUE(fs::exists(out / "checkpoint.bin"));
}

TEST_F(CliTest, InvalidInputsExitTwo) {
  const fs::path out = dir_ / "bad";
  Outcome r = Invoke({"train", "--config", config_.string(), "--mode", "ppo", "--out", out.string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("grpo"), std::string::npos);
  r = Invoke({"train", "--config", config_.string(), "--set", "training.learning_rate=abc", "--out",
           out.string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("training.learning_rate"), std::string::npos);

  const fs::path broken = dir_ / "broken.ini";
  std::ofstream(broken) << "[training]\nseed = 1\n\n# comment\nthis line is wrong\n";
  r = Invoke({"train", "--config", broken.string(), "--out", out.string()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("line 5"), std::string::npos) << r.err;

  r = Invoke({"train", "--config", config_.string()});
  EXPECT_EQ(r.code, kExitInvalid);
  r = Invoke({"eval", "--config", config_.string(), "--checkpoint", (dir_ / "none.bin").string(),
           "--out", out.string()});
  EXPECT_EQ(r.code, kExitInvalid);
}

TEST_F(CliTest, IoFailuresExitThree) {
  Outcome r = Invoke({"train", "--config", (dir_ / "missing.ini").string(), "--out",
                   (dir_ / "x").string()});
  EXPECT_EQ(r.code, kExitIo);
  const fs::path blocker = dir_ / "file";
  std::ofstream(blocker) << "x";
  r = Invoke({"train", "--config", config_.string(), "--out", (blocker / "sub").string()});
  EXPECT_EQ(r.code, kExitIo);
}

TEST_F(CliTest, EvalSingleRepeatHasZeroStd) {
  const fs::path run_dir = dir_ / "run";
  ASSERT_EQ(Invoke({"train", "--config", config_.string(), "--out", run_dir.string()}).code, kExitOk);
  const fs::path eval_dir = dir_ / "eval";
  const Outcome r = Invoke({"eval", "--config", config_.string(), "--checkpoint",
                         (run_dir / "checkpoint.bin").string(), "--episodes", "16", "--repeats",
                         "1", "--out", eval_dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(ReadFile(eval_dir / "eval.csv"));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "row,mean_f1,mean_n,m_over_n,good_tool_fraction,mean_delta_h");
  std::string std_row;
  while (std::getline(lines, line)) {
    if (line.rfind("std,", 0) == 0) std_row = line;
  }
  EXPECT_EQ(std_row, "std,0,0,0,0,0");
}

TEST_F(CliTest, AnalyzeVerifyAndExport) {
  const fs::path run_dir = dir_ / "run";
  std::ofstream(config_, std::ios::app) << "[training]\ntotal_steps = 3\n";
  ASSERT_EQ(Invoke({"train", "--config", config_.string(), "--out", run_dir.string()}).code, kExitOk);
  const fs::path report = dir_ / "report.csv";
  const Outcome r = Invoke({"analyze", "--input", (run_dir / "trajectories.jsonl").string(),
                         "--out", report.string(), "--verify"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("score"), std::string::npos);
  EXPECT_EQ(ReadFile(report).rfind("score,count,mean_delta_h,mean_delta_ratio,degenerate\n", 0),
            0u);
  const Outcome missing =
      Invoke({"analyze", "--input", (dir_ / "none.jsonl").string(), "--out", report.string()});
  EXPECT_EQ(missing.code, kExitIo);
}

}  // namespace
}  // namespace tepo::cli
