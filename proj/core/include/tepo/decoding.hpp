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

#ifndef TEPO_DECODING_HPP_
#define TEPO_DECODING_HPP_

#include <vector>

#include "tepo/vocabulary.hpp"

namespace tepo {

struct DecodingConfig {
  // Reasoning tokens emitted before every decision (tool call or answer).
  int reasoning_tokens = 1;
  // Forces ANS_OPEN once this many calls were made; 0 disables the limit.
  int max_tool_calls = 0;
  // The rollout is truncated after the observation of call max_steps.
  int max_steps = 4;
};

void validate(const DecodingConfig& config);

enum class Phase { kReasoning, kInToolQuery, kAwaitObservation, kInAnswer, kDone };

struct FsmState {
  Phase phase = Phase::kReasoning;
  // kReasoning: reasoning tokens emitted in the current segment.
  // kInToolQuery / kInAnswer: tokens emitted since the opener.
  int position = 0;
  int calls = 0;
  bool truncated = false;

  friend bool operator==(const FsmState&, const FsmState&) = default;
};

// Masked-decoding state machine. Legal sets per state:
//   reasoning (position < L)   : value tokens, THINK
//   reasoning (position == L)  : tool openers (unless capped), ANS_OPEN
//   tool query                 : key tokens, then TOOL_CLOSE
//   awaiting observation       : none (executor's turn)
//   answer                     : value tokens, then ANS_CLOSE, then FIN
// Every accepted token sequence segments without error.
class DecodingMachine {
 public:
  DecodingMachine(const Vocabulary& vocab, DecodingConfig config);

  const DecodingConfig& config() const { return config_; }

  std::vector<bool> legal_mask(const FsmState& state) const;
  bool is_legal(const FsmState& state, TokenId token) const;

  // Agent token transition. Throws Error(kIllegalToken) for tokens outside
  // the legal set.
  FsmState advance(const FsmState& state, TokenId token) const;
  // Executor returned the observation of the pending call.
  FsmState observe(const FsmState& state) const;

 private:
  Vocabulary vocab_;
  DecodingConfig config_;
};

}  // namespace tepo

#endif  // TEPO_DECODING_HPP_
