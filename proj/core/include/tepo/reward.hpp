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

#ifndef TEPO_REWARD_HPP_
#define TEPO_REWARD_HPP_

#include <span>

#include "tepo/vocabulary.hpp"

namespace tepo {

struct RewardConfig {
  // Dense bonus coefficient for entropy-reducing calls.
  double alpha = 0.5;
  // Stabilizer for group normalization.
  double epsilon = 1e-8;
};

void validate(const RewardConfig& config);

// Bag-of-tokens F1 with multiset overlap. Both empty gives 1, exactly one
// empty gives 0.
double f1_score(std::span<const TokenId> predicted, std::span<const TokenId> gold);

// f1 * m / n, or f1 when the rollout made no calls. Throws
// Error(kInvalidCounts) unless 0 <= m <= n.
double sparse_reward(double f1, int n, int m);

// f1 * (1 + alpha * indicator).
double dense_tool_reward(double f1, int indicator, double alpha);

}  // namespace tepo

#endif  // TEPO_REWARD_HPP_
