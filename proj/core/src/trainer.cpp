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

#include "tepo/trainer.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <thread>

#include <fmt/format.h>

#include "tepo/entropy.hpp"
#include "tepo/error.hpp"
#include "tepo/trajectory_io.hpp"

namespace tepo {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index writes
// only its own output slot, so results do not depend on scheduling.
template <typename Fn>
void ParallelFor(int n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int count = std::min(workers, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += count) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void AddScaled(PolicyParams& params, const PolicyParams& delta, double scale) {
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    params.weights[i] += scale * delta.weights[i];
  }
}

double Mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double PopulationStd(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double mu = Mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

std::string Num(double x) { return fmt::format("{}", x); }

}  // namespace

std::string_view ModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kGrpo:
      return "grpo";
    case TrainMode::kTepoSparse:
      return "tepo_sparse";
    case TrainMode::kTepoDense:
      return "tepo_dense";
  }
  return "unknown";
}

std::optional<TrainMode> ParseMode(std::string_view name) {
  if (name == "grpo") return TrainMode::kGrpo;
  if (name == "sparse" || name == "tepo_sparse") return TrainMode::kTepoSparse;
  if (name == "dense" || name == "tepo_dense") return TrainMode::kTepoDense;
  return std::nullopt;
}

void validate(const TrainConfig& c) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (c.rollouts_per_question < 2) bad("training.rollouts_per_question must be >= 2");
  if (c.questions_per_step < 1) bad("training.questions_per_step must be >= 1");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    bad("training.learning_rate must be a finite value > 0");
  }
  if (c.total_steps < 0) bad("training.total_steps must be >= 0");
  if (c.warmup_steps < 0) bad("training.warmup_steps must be >= 0");
  if (!(c.warmup_learning_rate >= 0.0) || !std::isfinite(c.warmup_learning_rate)) {
    bad("training.warmup_learning_rate must be a finite value >= 0");
  }
  if (c.num_workers < 1) bad("training.num_workers must be >= 1");
  if (!(c.policy.init_scale >= 0.0) || !std::isfinite(c.policy.init_scale)) {
    bad("policy.init_scale must be a finite value >= 0");
  }
  if (c.logging.trajectory_every < 1) bad("logging.trajectory_every must be >= 1");
  validate(c.reward);
  validate(c.objective);
  validate(c.environment);
  validate(DecodingConfig{c.policy.reasoning_tokens, c.environment.max_tool_calls,
                          c.environment.max_steps});
}

Policy make_policy(const EnvironmentConfig& env, const PolicyConfig& policy) {
  return Policy(make_vocabulary(env),
                DecodingConfig{policy.reasoning_tokens, env.max_tool_calls, env.max_steps});
}

Policy make_policy(const TrainConfig& config) {
  return make_policy(config.environment, config.policy);
}

Rollout run_rollout(const Policy& policy, const PolicyParams& params, const Task& task,
                    const EnvironmentConfig& env, Rng& policy_rng, Rng& tool_rng,
                    std::string rollout_id) {
  const Vocabulary& vocab = policy.vocab();
  Rollout r;
  r.question_id = task.question_id;
  r.rollout_id = std::move(rollout_id);
  r.question_key = task.question_key;
  r.gold = task.gold_value;

  std::vector<bool> truthful;
  DecodeContext ctx = policy.initial_context(task.question_key);
  int pending_tool = -1;
  TokenId pending_query = -1;
  while (ctx.fsm.phase != Phase::kDone) {
    TokenRecord t;
    t.position = static_cast<int>(r.tokens.size());
    if (ctx.fsm.phase == Phase::kAwaitObservation) {
      const auto& spec = env.tools[static_cast<std::size_t>(pending_tool)];
      Observation obs = execute_tool(spec, pending_query, task, vocab, tool_rng);
      truthful.push_back(obs.truthful);
      for (std::size_t i = 0; i < obs.tokens.size(); ++i) {
        TokenRecord o;
        o.position = static_cast<int>(r.tokens.size());
        o.token_id = obs.tokens[i];
        o.text = vocab.text(o.token_id);
        o.kind = SegmentKind::kObservation;
        r.tokens.push_back(std::move(o));
      }
      ctx = policy.after_observation(ctx, obs.tokens.back(), pending_tool);
      continue;
    }
    const SampledToken s = policy.sample_token(params, ctx, policy_rng);
    if (auto tool = vocab.tool_of(s.token)) pending_tool = *tool;
    if (vocab.is_key(s.token) && ctx.fsm.phase == Phase::kInToolQuery) pending_query = s.token;
    t.token_id = s.token;
    t.text = vocab.text(s.token);
    t.entropy = s.entropy;
    t.logprob_old = s.logprob;
    r.tokens.push_back(std::move(t));
    ctx = policy.after_token(ctx, s.token);
  }
  r.terminated_by = ctx.fsm.truncated ? Termination::kMaxSteps : Termination::kFinish;

  apply_segmentation(r);
  attach_tool_records(r);
  r = annotate_rollout_entropies(std::move(r));
  for (std::size_t i = 0; i < r.tool_calls.size(); ++i) {
    auto& c = r.tool_calls[i];
    c.truthful = truthful[i];
    c.quality_score = oracle_judge(c, task, vocab);
  }
  r.answer_tokens = extract_answer(r);
  const TokenId gold[] = {task.gold_value};
  r.f1 = f1_score(r.answer_tokens, gold);
  return r;
}

GroupAdvantages compute_group_advantages(TrainMode mode, std::span<const Rollout> group,
                                         const RewardConfig& reward) {
  GroupAdvantages out;
  std::vector<double> f1s;
  f1s.reserve(group.size());
  for (const auto& r : group) f1s.push_back(r.f1.value_or(0.0));
  switch (mode) {
    case TrainMode::kGrpo:
      out.rewards = f1s;
      out.maps = assign_sparse(group, out.rewards, reward.epsilon);
      break;
    case TrainMode::kTepoSparse:
      for (std::size_t i = 0; i < group.size(); ++i) {
        out.rewards.push_back(sparse_reward(f1s[i], group[i].num_calls(),
                                            group[i].num_entropy_decreasing()));
      }
      out.maps = assign_sparse(group, out.rewards, reward.epsilon);
      break;
    case TrainMode::kTepoDense: {
      std::vector<std::vector<double>> tool_rewards(group.size());
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (const auto& c : group[i].tool_calls) {
          tool_rewards[i].push_back(dense_tool_reward(f1s[i], c.indicator, reward.alpha));
        }
        out.rewards.push_back(tool_rewards[i].empty() ? f1s[i] : Mean(tool_rewards[i]));
      }
      const ToolRewardPool pool = build_tool_pool(group, tool_rewards);
      out.maps = assign_dense(group, pool, f1s, reward.epsilon);
      break;
    }
  }
  return out;
}

StepMetrics summarize_rollouts(std::span<const Rollout> rollouts,
                               std::span<const double> rewards,
                               const EnvironmentConfig& env) {
  StepMetrics m;
  if (rollouts.empty()) return m;
  const std::string best = tool_names(env)[static_cast<std::size_t>(best_tool(env))];
  long total_n = 0;
  long total_m = 0;
  long good = 0;
  long scored_delta = 0;
  double delta_sum = 0.0;
  double f1_sum = 0.0;
  for (const auto& r : rollouts) {
    total_n += r.num_calls();
    total_m += r.num_entropy_decreasing();
    f1_sum += r.f1.value_or(0.0);
    for (const auto& c : r.tool_calls) {
      if (env.tools.size() == 1 || c.tool == best) ++good;
      if (c.entropy_annotated && !c.degenerate) {
        delta_sum += c.delta;
        ++scored_delta;
      }
    }
  }
  const double count = static_cast<double>(rollouts.size());
  m.mean_n = static_cast<double>(total_n) / count;
  m.mean_m = static_cast<double>(total_m) / count;
  m.ratio_m_over_n =
      total_n > 0 ? static_cast<double>(total_m) / static_cast<double>(total_n) : 0.0;
  m.mean_reward = Mean(rewards);
  m.mean_f1 = f1_sum / count;
  m.mean_delta_h = scored_delta > 0 ? delta_sum / static_cast<double>(scored_delta) : 0.0;
  m.good_tool_fraction =
      total_n > 0 ? static_cast<double>(good) / static_cast<double>(total_n) : 0.0;
  return m;
}

StepResult train_step(const Policy& policy, const PolicyParams& params,
                      const PolicyParams& reference, const TrainConfig& config,
                      int step) {
  const int q_count = config.questions_per_step;
  const int n_per = config.rollouts_per_question;
  const auto ustep = static_cast<std::uint64_t>(step);

  StepResult out;
  out.groups.resize(static_cast<std::size_t>(q_count));
  std::vector<GroupAdvantages> advantages(static_cast<std::size_t>(q_count));
  ParallelFor(q_count, config.num_workers, [&](int q) {
    const auto uq = static_cast<std::uint64_t>(q);
    Rng question_rng = Rng::Derive(config.seed, Stream::kQuestion, {ustep, uq});
    const Task task =
        generate_task(question_rng, policy.vocab(), fmt::format("s{}-q{}", step, q));
    auto& group = out.groups[static_cast<std::size_t>(q)];
    group.reserve(static_cast<std::size_t>(n_per));
    for (int i = 0; i < n_per; ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      Rng policy_rng = Rng::Derive(config.seed, Stream::kRollout, {ustep, uq, ui});
      Rng tool_rng = Rng::Derive(config.seed, Stream::kTool, {ustep, uq, ui});
      group.push_back(run_rollout(policy, params, task, config.environment, policy_rng,
                                  tool_rng, fmt::format("{}-r{}", task.question_id, i)));
    }
    advantages[static_cast<std::size_t>(q)] =
        compute_group_advantages(config.mode, group, config.reward);
  });

  std::vector<std::vector<AdvantageMap>> maps;
  std::vector<Rollout> flat;
  std::vector<double> rewards;
  maps.reserve(advantages.size());
  for (std::size_t q = 0; q < advantages.size(); ++q) {
    maps.push_back(std::move(advantages[q].maps));
    rewards.insert(rewards.end(), advantages[q].rewards.begin(),
                   advantages[q].rewards.end());
    flat.insert(flat.end(), out.groups[q].begin(), out.groups[q].end());
  }

  out.params = params;
  double objective = 0.0;
  for (int epoch = 0; epoch < config.objective.minibatch_epochs; ++epoch) {
    const ObjectiveResult res = batch_objective_and_gradient(
        policy, out.groups, maps, out.params, reference, config.objective);
    if (epoch == 0) objective = res.value;
    AddScaled(out.params, res.gradient, config.learning_rate);
  }
  if (!out.params.all_finite()) {
    throw Error(ErrorCode::kNonFinite,
                fmt::format("parameters became non-finite at step {}", step));
  }

  out.metrics = summarize_rollouts(flat, rewards, config.environment);
  out.metrics.step = step;
  out.metrics.objective_value = objective;
  return out;
}

std::string metrics_csv_header() {
  return "step,mode,mean_n,mean_m,m_over_n,mean_reward,mean_f1,mean_delta_h,objective,"
         "good_tool_fraction";
}

std::string metrics_csv_row(const StepMetrics& m, TrainMode mode) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", m.step, ModeName(mode), Num(m.mean_n),
                     Num(m.mean_m), Num(m.ratio_m_over_n), Num(m.mean_reward),
                     Num(m.mean_f1), Num(m.mean_delta_h), Num(m.objective_value),
                     Num(m.good_tool_fraction));
}

void write_metrics_csv(const std::filesystem::path& path,
                       std::span<const StepMetrics> metrics, TrainMode mode) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << metrics_csv_header() << '\n';
  for (const auto& m : metrics) out << metrics_csv_row(m, mode) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

PolicyParams warmup(const TrainConfig& config, const PolicyParams& initial) {
  validate(config);
  if (config.warmup_steps == 0) return initial;
  const Policy policy = make_policy(config);
  TrainConfig w = config;
  w.mode = TrainMode::kGrpo;
  if (config.warmup_learning_rate > 0.0) w.learning_rate = config.warmup_learning_rate;
  w.seed = Rng::Derive(config.seed, Stream::kWarmup)();
  PolicyParams params = initial;
  for (int step = 1; step <= config.warmup_steps; ++step) {
    params = train_step(policy, params, initial, w, step).params;
  }
  return params;
}

TrainResult train(const TrainConfig& config, const TrainOutputs& outputs) {
  validate(config);
  const Policy policy = make_policy(config);
  const PolicyParams initial = policy.init_params(config.policy.init_scale, config.seed);
  return train_from(config, warmup(config, initial), outputs);
}

TrainResult train_from(const TrainConfig& config, const PolicyParams& initial,
                       const TrainOutputs& outputs) {
  validate(config);
  const Policy policy = make_policy(config);
  if (initial.rows != policy.vocab_size() || initial.cols != policy.feature_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "initial parameters do not match the policy");
  }

  std::ofstream csv;
  if (outputs.metrics_csv) {
    csv.open(*outputs.metrics_csv, std::ios::trunc);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write " + outputs.metrics_csv->string());
    csv << metrics_csv_header() << '\n';
  }
  std::unique_ptr<JsonlWriter> jsonl;
  if (outputs.trajectories_jsonl && config.logging.trajectories) {
    jsonl = std::make_unique<JsonlWriter>(*outputs.trajectories_jsonl);
  }

  TrainResult result;
  result.params = initial;
  const PolicyParams reference = initial;
  for (int step = 1; step <= config.total_steps; ++step) {
    StepResult s = train_step(policy, result.params, reference, config, step);
    result.params = std::move(s.params);
    if (csv.is_open()) {
      csv << metrics_csv_row(s.metrics, config.mode) << '\n';
      if (!csv) throw Error(ErrorCode::kIo, "write failed: " + outputs.metrics_csv->string());
    }
    const bool log_step = config.logging.trajectories &&
                          (step - 1) % config.logging.trajectory_every == 0;
    if (log_step) {
      for (const auto& group : s.groups) {
        for (const auto& r : group) {
          if (jsonl) jsonl->write(r);
          if (outputs.keep_trajectories) result.trajectories.push_back(r);
        }
      }
    }
    if (outputs.on_step) outputs.on_step(s.metrics);
    result.metrics.push_back(s.metrics);
  }
  if (csv.is_open()) {
    csv.flush();
    if (!csv) throw Error(ErrorCode::kIo, "write failed: " + outputs.metrics_csv->string());
  }
  if (jsonl) jsonl->flush();
  return result;
}

EvalReport evaluate(const Policy& policy, const PolicyParams& params,
                    const EnvironmentConfig& env, const EvalConfig& config,
                    std::vector<Rollout>* corpus) {
  if (config.episodes < 1) {
    throw Error(ErrorCode::kInvalidConfig, "eval.episodes must be >= 1");
  }
  if (config.repeats < 1) {
    throw Error(ErrorCode::kInvalidConfig, "eval.repeats must be >= 1");
  }
  EvalReport report;
  for (int rep = 0; rep < config.repeats; ++rep) {
    std::vector<Rollout> rollouts;
    std::vector<double> f1s;
    rollouts.reserve(static_cast<std::size_t>(config.episodes));
    for (int e = 0; e < config.episodes; ++e) {
      const auto ur = static_cast<std::uint64_t>(rep);
      const auto ue = static_cast<std::uint64_t>(e);
      Rng question_rng = Rng::Derive(config.seed, Stream::kEval, {ur, ue, 0});
      Rng policy_rng = Rng::Derive(config.seed, Stream::kEval, {ur, ue, 1});
      Rng tool_rng = Rng::Derive(config.seed, Stream::kEval, {ur, ue, 2});
      const Task task =
          generate_task(question_rng, policy.vocab(), fmt::format("e{}-q{}", rep, e));
      rollouts.push_back(run_rollout(policy, params, task, env, policy_rng, tool_rng,
                                     task.question_id + "-r0"));
      f1s.push_back(rollouts.back().f1.value_or(0.0));
    }
    const StepMetrics m = summarize_rollouts(rollouts, f1s, env);
    report.repeats.push_back(EvalMetrics{m.mean_f1, m.mean_n, m.ratio_m_over_n,
                                         m.good_tool_fraction, m.mean_delta_h});
    if (corpus) corpus->insert(corpus->end(), rollouts.begin(), rollouts.end());
  }

  auto column = [&](double EvalMetrics::*field) {
    std::vector<double> xs;
    for (const auto& r : report.repeats) xs.push_back(r.*field);
    return xs;
  };
  for (double EvalMetrics::*field :
       {&EvalMetrics::mean_f1, &EvalMetrics::mean_n, &EvalMetrics::ratio_m_over_n,
        &EvalMetrics::good_tool_fraction, &EvalMetrics::mean_delta_h}) {
    const auto xs = column(field);
    report.mean.*field = Mean(xs);
    report.stddev.*field = PopulationStd(xs);
  }
  return report;
}

}  // namespace tepo
