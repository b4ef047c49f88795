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

#include "tepo/reward.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "tepo/error.hpp"

namespace tepo {

void validate(const RewardConfig& config) {
  if (!(config.alpha >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must be >= 0");
  }
  if (!(config.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must be > 0");
  }
}

double f1_score(std::span<const TokenId> predicted, std::span<const TokenId> gold) {
  if (predicted.empty() && gold.empty()) return 1.0;
  if (predicted.empty() || gold.empty()) return 0.0;
  std::map<TokenId, int> counts;
  for (TokenId t : gold) ++counts[t];
  int overlap = 0;
  for (TokenId t : predicted) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(predicted.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

double sparse_reward(double f1, int n, int m) {
  if (n < 0 || m < 0 || m > n) {
    throw Error(ErrorCode::kInvalidCounts,
                "need 0 <= m <= n, got n=" + std::to_string(n) +
                    " m=" + std::to_string(m));
  }
  if (n == 0) return f1;
  // m / n first, so m == n returns f1 unchanged.
  return f1 * (static_cast<double>(m) / static_cast<double>(n));
}

double dense_tool_reward(double f1, int indicator, double alpha) {
  return f1 * (1.0 + alpha * static_cast<double>(indicator));
}

}  // namespace tepo
