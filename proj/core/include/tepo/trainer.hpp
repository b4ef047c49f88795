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

#ifndef TEPO_TRAINER_HPP_
#define TEPO_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tepo/advantage.hpp"
#include "tepo/grpo.hpp"
#include "tepo/policy.hpp"
#include "tepo/reward.hpp"
#include "tepo/toolenv.hpp"
#include "tepo/trajectory.hpp"

namespace tepo {

enum class TrainMode { kGrpo, kTepoSparse, kTepoDense };

std::string_view ModeName(TrainMode mode);
// Accepts grpo, sparse, tepo_sparse, dense, tepo_dense.
std::optional<TrainMode> ParseMode(std::string_view name);

struct PolicyConfig {
  int reasoning_tokens = 1;
  // Standard deviation of the initial weights; 0 gives the uniform policy.
  double init_scale = 0.0;
};

struct LoggingConfig {
  bool trajectories = false;
  // Log the rollouts of every n-th step.
  int trajectory_every = 1;
};

struct TrainConfig {
  TrainMode mode = TrainMode::kGrpo;
  int rollouts_per_question = 8;
  int questions_per_step = 32;
  double learning_rate = 0.5;
  int total_steps = 300;
  // Shared GRPO steps run before the mode-specific phase. They start every
  // mode from the same briefly trained policy and are not logged.
  int warmup_steps = 0;
  // 0 means use learning_rate.
  double warmup_learning_rate = 0.0;
  RewardConfig reward;
  ObjectiveConfig objective;
  std::uint64_t seed = 0;
  EnvironmentConfig environment;
  PolicyConfig policy;
  LoggingConfig logging;
  int num_workers = 1;
};

void validate(const TrainConfig& config);

Policy make_policy(const EnvironmentConfig& env, const PolicyConfig& policy);
Policy make_policy(const TrainConfig& config);

struct StepMetrics {
  int step = 0;
  double mean_n = 0.0;
  double mean_m = 0.0;
  double ratio_m_over_n = 0.0;
  double mean_reward = 0.0;
  double mean_f1 = 0.0;
  double mean_delta_h = 0.0;
  double objective_value = 0.0;
  double good_tool_fraction = 0.0;
};

// Samples one trajectory: alternates policy sampling and tool execution
// under the decoding state machine until FIN or truncation, then segments,
// attaches call records, annotates entropies, judges every call and scores
// the answer.
Rollout run_rollout(const Policy& policy, const PolicyParams& params,
                    const Task& task, const EnvironmentConfig& env,
                    Rng& policy_rng, Rng& tool_rng, std::string rollout_id);

// Per-rollout mode reward and the token advantages for one question group.
struct GroupAdvantages {
  std::vector<double> rewards;
  std::vector<AdvantageMap> maps;
};

GroupAdvantages compute_group_advantages(TrainMode mode, std::span<const Rollout> group,
                                         const RewardConfig& reward);

struct StepResult {
  PolicyParams params;
  StepMetrics metrics;
  std::vector<std::vector<Rollout>> groups;
};

// Samples the step's groups from `params` (the snapshot), computes
// mode-specific advantages and applies minibatch_epochs gradient-ascent
// updates of the token-level objective.
StepResult train_step(const Policy& policy, const PolicyParams& params,
                      const PolicyParams& reference, const TrainConfig& config,
                      int step);

struct TrainOutputs {
  std::optional<std::filesystem::path> metrics_csv;
  std::optional<std::filesystem::path> trajectories_jsonl;
  bool keep_trajectories = false;
  std::function<void(const StepMetrics&)> on_step;
};

struct TrainResult {
  PolicyParams params;
  std::vector<StepMetrics> metrics;
  std::vector<Rollout> trajectories;
};

// Runs config.warmup_steps GRPO steps from `initial` on the warm-up seed
// stream and returns the resulting parameters. Independent of config.mode.
PolicyParams warmup(const TrainConfig& config, const PolicyParams& initial);

// Initializes, warms up, then runs the mode-specific phase.
TrainResult train(const TrainConfig& config, const TrainOutputs& outputs = {});
// Runs only the mode-specific phase from the given parameters; the KL
// reference is `initial`.
TrainResult train_from(const TrainConfig& config, const PolicyParams& initial,
                       const TrainOutputs& outputs = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const StepMetrics& m, TrainMode mode);
void write_metrics_csv(const std::filesystem::path& path,
                       std::span<const StepMetrics> metrics, TrainMode mode);

StepMetrics summarize_rollouts(std::span<const Rollout> rollouts,
                               std::span<const double> rewards,
                               const EnvironmentConfig& env);

struct EvalConfig {
  int episodes = 256;
  int repeats = 5;
  std::uint64_t seed = 0;
};

struct EvalMetrics {
  double mean_f1 = 0.0;
  double mean_n = 0.0;
  double ratio_m_over_n = 0.0;
  double good_tool_fraction = 0.0;
  double mean_delta_h = 0.0;
};

struct EvalReport {
  std::vector<EvalMetrics> repeats;
  EvalMetrics mean;
  EvalMetrics stddev;  // population standard deviation across repeats
};

// Runs `repeats` independent seeded passes of `episodes` rollouts each,
// without parameter updates.
EvalReport evaluate(const Policy& policy, const PolicyParams& params,
                    const EnvironmentConfig& env, const EvalConfig& config,
                    std::vector<Rollout>* corpus = nullptr);

}  // namespace tepo

#endif  // TEPO_TRAINER_HPP_
