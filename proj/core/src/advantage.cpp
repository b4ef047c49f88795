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

#include "tepo/advantage.hpp"

#include <algorithm>
#include <cmath>

#include "tepo/error.hpp"

namespace tepo {

std::vector<double> group_normalize(std::span<const double> values,
                                    double epsilon) {
  if (values.empty()) throw Error(ErrorCode::kEmptyGroup, "empty group");
  const double n = static_cast<double>(values.size());
  const bool constant = std::all_of(values.begin(), values.end(),
                                    [&](double v) { return v == values[0]; });
  if (constant) return std::vector<double>(values.size(), 0.0);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);

  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - mean) / (sd + epsilon));
  return out;
}

namespace {

AdvantageMap EmptyMap(const Rollout& r) {
  AdvantageMap m;
  m.values.assign(r.tokens.size(), 0.0);
  m.excluded.resize(r.tokens.size());
  for (std::size_t t = 0; t < r.tokens.size(); ++t) {
    m.excluded[t] = r.tokens[t].loss_masked;
  }
  return m;
}

void Fill(AdvantageMap& map, int begin, int end, double value) {
  for (int t = begin; t < end; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (!map.excluded[i]) map.values[i] = value;
  }
}

}  // namespace

std::vector<AdvantageMap> assign_sparse(std::span<const Rollout> group,
                                        std::span<const double> rewards,
                                        double epsilon) {
  if (group.size() != rewards.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "got " + std::to_string(rewards.size()) + " rewards for " +
                    std::to_string(group.size()) + " rollouts");
  }
  const auto traj = group_normalize(rewards, epsilon);
  std::vector<AdvantageMap> out;
  out.reserve(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    auto map = EmptyMap(group[i]);
    Fill(map, 0, static_cast<int>(map.size()), traj[i]);
    out.push_back(std::move(map));
  }
  return out;
}

ToolRewardPool build_tool_pool(std::span<const Rollout> group,
                               const std::vector<std::vector<double>>& tool_rewards) {
  if (group.size() != tool_rewards.size()) {
    throw Error(ErrorCode::kSizeMismatch, "one reward list per rollout expected");
  }
  ToolRewardPool pool;
  if (!group.empty()) pool.question_id = group.front().question_id;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto& calls = group[i].tool_calls;
    if (tool_rewards[i].size() != calls.size()) {
      throw Error(ErrorCode::kSizeMismatch,
                  "rollout " + group[i].rollout_id + ": reward count differs from call count");
    }
    for (std::size_t c = 0; c < calls.size(); ++c) {
      pool.entries.push_back(ToolRewardEntry{group[i].rollout_id,
                                             static_cast<int>(i), calls[c].k,
                                             tool_rewards[i][c]});
    }
  }
  return pool;
}

std::vector<AdvantageMap> assign_dense(std::span<const Rollout> group,
                                       const ToolRewardPool& pool,
                                       std::span<const double> f1_scores,
                                       double epsilon) {
  if (group.size() != f1_scores.size()) {
    throw Error(ErrorCode::kSizeMismatch, "one F1 score per rollout expected");
  }
  for (const auto& r : group) {
    for (const auto& c : r.tool_calls) {
      if (!c.entropy_annotated) {
        throw Error(ErrorCode::kMissingEntropyAnnotation,
                    "rollout " + r.rollout_id + " call " + std::to_string(c.k));
      }
    }
  }

  std::vector<double> pool_values;
  pool_values.reserve(pool.size());
  for (const auto& e : pool.entries) pool_values.push_back(e.reward);
  std::vector<double> tool_adv(pool.size(), 0.0);
  if (pool.size() > 1) tool_adv = group_normalize(pool_values, epsilon);

  // tool advantage lookup per (rollout, k)
  std::vector<std::vector<double>> per_call(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    per_call[i].assign(group[i].tool_calls.size(), 0.0);
  }
  for (std::size_t e = 0; e < pool.size(); ++e) {
    const auto& entry = pool.entries[e];
    const auto i = static_cast<std::size_t>(entry.rollout_index);
    if (i >= group.size() || entry.k < 1 ||
        static_cast<std::size_t>(entry.k) > per_call[i].size()) {
      throw Error(ErrorCode::kSizeMismatch, "pool entry does not match group");
    }
    per_call[i][static_cast<std::size_t>(entry.k - 1)] = tool_adv[e];
  }

  const auto outcome = group_normalize(f1_scores, epsilon);
  std::vector<AdvantageMap> out;
  out.reserve(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    const Rollout& r = group[i];
    auto map = EmptyMap(r);
    int tail_start = 0;
    for (const auto& call : r.tool_calls) {
      const double a = per_call[i][static_cast<std::size_t>(call.k - 1)];
      if (const Segment* pre = r.reasoning_segment(call.k - 1)) {
        Fill(map, pre->start, pre->end, a);
      }
      Fill(map, call.action_start, call.action_end, a);
      tail_start = call.action_end;
    }
    Fill(map, tail_start, static_cast<int>(map.size()), outcome[i]);
    out.push_back(std::move(map));
  }
  return out;
}

}  // namespace tepo
