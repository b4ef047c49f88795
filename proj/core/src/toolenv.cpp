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

#include "tepo/toolenv.hpp"

#include "tepo/error.hpp"

namespace tepo {

void validate(const EnvironmentConfig& config) {
  if (config.num_keys < 1 || config.num_keys > Vocabulary::kMaxKeys) {
    throw Error(ErrorCode::kInvalidConfig, "environment.num_keys must be in [1, 26]");
  }
  if (config.num_values < 2) {
    throw Error(ErrorCode::kInvalidConfig, "environment.num_values must be >= 2");
  }
  if (config.tools.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "environment.tools must list at least one tool");
  }
  for (const auto& t : config.tools) {
    if (t.name.empty() || t.name.find_first_of(": ,") != std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "environment.tools: invalid tool name '" + t.name + "'");
    }
    if (!(t.quality >= 0.0 && t.quality <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "environment.tools: quality of '" + t.name + "' must be in [0, 1]");
    }
  }
  if (config.max_steps < 1) {
    throw Error(ErrorCode::kInvalidConfig, "environment.max_steps must be >= 1");
  }
  if (config.max_tool_calls < 0) {
    throw Error(ErrorCode::kInvalidConfig, "environment.max_tool_calls must be >= 0");
  }
}

std::vector<std::string> tool_names(const EnvironmentConfig& config) {
  std::vector<std::string> names;
  for (const auto& t : config.tools) names.push_back(t.name);
  return names;
}

Vocabulary make_vocabulary(const EnvironmentConfig& config) {
  validate(config);
  return Vocabulary(config.num_values, config.num_keys, tool_names(config));
}

int best_tool(const EnvironmentConfig& config) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(config.tools.size()); ++i) {
    if (config.tools[static_cast<std::size_t>(i)].quality >
        config.tools[static_cast<std::size_t>(best)].quality) {
      best = i;
    }
  }
  return best;
}

Task generate_task(Rng& rng, const Vocabulary& vocab, std::string question_id) {
  Task task;
  task.question_id = std::move(question_id);
  task.question_key = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(vocab.num_keys())));
  task.gold_value = vocab.value(
      static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(vocab.num_values()))));
  return task;
}

Observation execute_tool(const ToolSpec& spec, TokenId query_key, const Task& task,
                         const Vocabulary& vocab, Rng& rng) {
  if (!vocab.is_key(query_key)) {
    throw Error(ErrorCode::kInvalidQuery,
                "query token " + std::to_string(query_key) + " is not a key");
  }
  Observation obs;
  const bool right_key = vocab.key_index(query_key) == task.question_key;
  if (right_key && rng.Uniform() < spec.quality) {
    obs.tokens = {task.gold_value};
    obs.truthful = true;
    return obs;
  }
  // uniform over the num_values - 1 non-gold values
  auto pick = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(vocab.num_values() - 1)));
  if (vocab.value(pick) >= task.gold_value) ++pick;
  obs.tokens = {vocab.value(pick)};
  obs.truthful = false;
  return obs;
}

int oracle_judge(const ToolCallRecord& call, const Task& task,
                 const Vocabulary& vocab) {
  if (call.query.size() != 1 || !vocab.is_key(call.query.front())) return 0;
  if (vocab.key_index(call.query.front()) != task.question_key) return 0;
  return call.truthful.value_or(false) ? 1 : 0;
}

}  // namespace tepo
