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

#include "tepo/decoding.hpp"

#include <string>

#include "tepo/error.hpp"

namespace tepo {

void validate(const DecodingConfig& config) {
  if (config.reasoning_tokens < 1) {
    throw Error(ErrorCode::kInvalidConfig, "policy.reasoning_tokens must be >= 1");
  }
  if (config.max_tool_calls < 0) {
    throw Error(ErrorCode::kInvalidConfig, "environment.max_tool_calls must be >= 0");
  }
  if (config.max_steps < 1) {
    throw Error(ErrorCode::kInvalidConfig, "environment.max_steps must be >= 1");
  }
}

DecodingMachine::DecodingMachine(const Vocabulary& vocab, DecodingConfig config)
    : vocab_(vocab), config_(config) {
  validate(config_);
}

std::vector<bool> DecodingMachine::legal_mask(const FsmState& s) const {
  const Vocabulary& v = vocab_;
  std::vector<bool> mask(static_cast<std::size_t>(v.size()), false);
  auto allow = [&](TokenId id) { mask[static_cast<std::size_t>(id)] = true; };
  switch (s.phase) {
    case Phase::kReasoning:
      if (s.position < config_.reasoning_tokens) {
        for (int i = 0; i < v.num_values(); ++i) allow(v.value(i));
        allow(v.think());
      } else {
        const bool capped =
            config_.max_tool_calls > 0 && s.calls >= config_.max_tool_calls;
        if (!capped) {
          for (int t = 0; t < v.num_tools(); ++t) allow(v.tool_open(t));
        }
        allow(v.answer_open());
      }
      break;
    case Phase::kInToolQuery:
      if (s.position == 0) {
        for (int k = 0; k < v.num_keys(); ++k) allow(v.key(k));
      } else {
        allow(v.tool_close());
      }
      break;
    case Phase::kInAnswer:
      if (s.position == 0) {
        for (int i = 0; i < v.num_values(); ++i) allow(v.value(i));
      } else if (s.position == 1) {
        allow(v.answer_close());
      } else {
        allow(v.finish());
      }
      break;
    case Phase::kAwaitObservation:
    case Phase::kDone:
      break;
  }
  return mask;
}

bool DecodingMachine::is_legal(const FsmState& state, TokenId token) const {
  if (token < 0 || token >= vocab_.size()) return false;
  return legal_mask(state)[static_cast<std::size_t>(token)];
}

FsmState DecodingMachine::advance(const FsmState& s, TokenId token) const {
  if (!is_legal(s, token)) {
    throw Error(ErrorCode::kIllegalToken,
                "token " + std::to_string(token) + " not legal in current state");
  }
  FsmState next = s;
  switch (s.phase) {
    case Phase::kReasoning:
      if (s.position < config_.reasoning_tokens) {
        ++next.position;
      } else if (token == vocab_.answer_open()) {
        next.phase = Phase::kInAnswer;
        next.position = 0;
      } else {
        next.phase = Phase::kInToolQuery;
        next.position = 0;
      }
      break;
    case Phase::kInToolQuery:
      if (s.position == 0) {
        next.position = 1;
      } else {
        next.phase = Phase::kAwaitObservation;
        next.position = 0;
        ++next.calls;
      }
      break;
    case Phase::kInAnswer:
      if (s.position < 2) {
        ++next.position;
      } else {
        next.phase = Phase::kDone;
      }
      break;
    case Phase::kAwaitObservation:
    case Phase::kDone:
      break;
  }
  return next;
}

FsmState DecodingMachine::observe(const FsmState& s) const {
  if (s.phase != Phase::kAwaitObservation) {
    throw Error(ErrorCode::kMalformedTrajectory,
                "observation outside of a pending tool call");
  }
  FsmState next = s;
  next.position = 0;
  if (s.calls >= config_.max_steps) {
    next.phase = Phase::kDone;
    next.truncated = true;
  } else {
    next.phase = Phase::kReasoning;
  }
  return next;
}

}  // namespace tepo
