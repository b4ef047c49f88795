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

#ifndef TEPO_ADVANTAGE_HPP_
#define TEPO_ADVANTAGE_HPP_

#include <span>
#include <string>
#include <vector>

#include "tepo/trajectory.hpp"

namespace tepo {

// Token-aligned advantages for one rollout. Excluded (observation) tokens
// hold exactly 0.
struct AdvantageMap {
  std::vector<double> values;
  std::vector<bool> excluded;

  std::size_t size() const { return values.size(); }
};

struct ToolRewardEntry {
  std::string rollout_id;
  int rollout_index = 0;  // position of the rollout in its group
  int k = 0;
  double reward = 0.0;
};

// All tool rewards of one question's group.
struct ToolRewardPool {
  std::string question_id;
  std::vector<ToolRewardEntry> entries;

  std::size_t size() const { return entries.size(); }
};

// (v - mean) / (std + epsilon) with the population standard deviation. A
// constant list maps to all zeros. Throws Error(kEmptyGroup) on empty input.
std::vector<double> group_normalize(std::span<const double> values,
                                    double epsilon = 1e-8);

// Uniform trajectory-level assignment: every non-observation token of
// rollout i receives the group-normalized reward of rollout i.
std::vector<AdvantageMap> assign_sparse(std::span<const Rollout> group,
                                        std::span<const double> rewards,
                                        double epsilon = 1e-8);

// tool_rewards[i][k-1] is the reward of call k in rollout i.
ToolRewardPool build_tool_pool(std::span<const Rollout> group,
                               const std::vector<std::vector<double>>& tool_rewards);

// Dense assignment. For call k of rollout i, r_{k-1} and the action span
// a_k receive the pool-normalized tool advantage; tokens after the last
// observation receive the group-normalized outcome (F1) advantage, as do all
// tokens of call-free rollouts. Tool advantages are 0 when the pool has at
// most one entry. Throws Error(kMissingEntropyAnnotation) if any call has
// not been annotated.
std::vector<AdvantageMap> assign_dense(std::span<const Rollout> group,
                                       const ToolRewardPool& pool,
                                       std::span<const double> f1_scores,
                                       double epsilon = 1e-8);

}  // namespace tepo

#endif  // TEPO_ADVANTAGE_HPP_
