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

#ifndef TEPO_TOOLENV_HPP_
#define TEPO_TOOLENV_HPP_

#include <string>
#include <vector>

#include "tepo/decoding.hpp"
#include "tepo/rng.hpp"
#include "tepo/trajectory.hpp"
#include "tepo/vocabulary.hpp"

namespace tepo {

struct Task {
  std::string question_id;
  int question_key = 0;  // key index in [0, K)
  TokenId gold_value = 0;
};

struct ToolSpec {
  std::string name;
  // Probability of a truthful answer when the right key is queried.
  double quality = 1.0;
  // Recorded in metrics only, never rewarded.
  double cost = 1.0;
};

struct Observation {
  std::vector<TokenId> tokens;
  bool truthful = false;
};

struct EnvironmentConfig {
  int num_keys = 5;
  int num_values = 10;
  std::vector<ToolSpec> tools = {{"good", 0.95, 1.0}, {"noisy", 0.05, 1.0}};
  int max_steps = 4;
  // 0 = no cap. See DecodingConfig::max_tool_calls.
  int max_tool_calls = 0;
};

void validate(const EnvironmentConfig& config);

Vocabulary make_vocabulary(const EnvironmentConfig& config);
std::vector<std::string> tool_names(const EnvironmentConfig& config);
// Index of the highest-quality tool (first on ties).
int best_tool(const EnvironmentConfig& config);

Task generate_task(Rng& rng, const Vocabulary& vocab, std::string question_id);

// With probability `quality` returns the gold value (truthful) when the
// queried key is the task key; otherwise a uniformly random non-gold value.
// Wrong-key queries are never truthful. Throws Error(kInvalidQuery) for a
// non-key query token.
Observation execute_tool(const ToolSpec& spec, TokenId query_key, const Task& task,
                         const Vocabulary& vocab, Rng& rng);

// 1 iff the call queried the task key and received a truthful result.
int oracle_judge(const ToolCallRecord& call, const Task& task,
                 const Vocabulary& vocab);

}  // namespace tepo

#endif  // TEPO_TOOLENV_HPP_
