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

#ifndef TEPO_TRAJECTORY_HPP_
#define TEPO_TRAJECTORY_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tepo/vocabulary.hpp"

namespace tepo {

enum class SegmentKind { kReasoning, kToolAction, kObservation, kAnswer };

std::string_view SegmentKindName(SegmentKind kind);
std::optional<SegmentKind> SegmentKindFromName(std::string_view name);

struct TokenRecord {
  int position = 0;
  TokenId token_id = 0;
  std::string text;
  // Entropy (nats) of the distribution this token was sampled from.
  // Observation tokens are not sampled; they carry 0.
  double entropy = 0.0;
  double logprob_old = 0.0;
  SegmentKind kind = SegmentKind::kReasoning;
  bool loss_masked = false;
};

struct Segment {
  SegmentKind kind = SegmentKind::kReasoning;
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  // Reasoning ordinal (r_0, r_1, ...); -1 for other kinds.
  int ordinal = -1;

  int size() const { return end - start; }
  bool empty() const { return start == end; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct ToolCallRecord {
  int k = 0;  // 1-based
  int action_start = 0;
  int action_end = 0;
  // Tool name from the opener; empty when the vocabulary has a single tool.
  std::string tool;
  std::vector<TokenId> query;
  std::vector<TokenId> observation;
  // Hidden from the policy; known for simulator-generated calls.
  std::optional<bool> truthful;

  bool entropy_annotated = false;
  std::optional<double> h_pre;
  std::optional<double> h_post;
  double delta = 0.0;
  std::optional<double> ratio;
  int indicator = 0;
  // Set when either neighbouring reasoning segment is empty.
  bool degenerate = false;

  std::optional<int> quality_score;
};

enum class Termination { kFinish, kMaxSteps };

struct Rollout {
  std::string question_id;
  std::string rollout_id;
  // Task metadata; -1 when unknown (e.g. ingested external trajectories).
  int question_key = -1;
  TokenId gold = -1;

  std::vector<TokenRecord> tokens;
  std::vector<Segment> segments;
  std::vector<ToolCallRecord> tool_calls;
  std::vector<TokenId> answer_tokens;
  std::optional<double> f1;
  Termination terminated_by = Termination::kFinish;

  int num_calls() const { return static_cast<int>(tool_calls.size()); }
  int num_entropy_decreasing() const;
  // Reasoning segment r_ordinal, or nullptr if it does not exist.
  const Segment* reasoning_segment(int ordinal) const;
};

// Partitions a marked token stream into reasoning / tool-action /
// observation / answer segments.
//
// Grammar: reasoning is everything outside the bracketed spans; a tool
// action runs from a TOOL_OPEN through its TOOL_CLOSE and must be followed by
// one or more observation tokens; an answer runs from ANS_OPEN through
// ANS_CLOSE and the trailing FIN. A FIN with no answer block forms a
// one-token answer segment. One reasoning segment (possibly empty) is
// emitted before the first action and after every observation, so a stream
// with n calls has exactly n + 1 reasoning segments.
//
// Throws Error(kMalformedTrajectory) for unbalanced markers, observations
// without a preceding action, or tokens after FIN.
std::vector<Segment> segment_tokens(std::span<const TokenMarker> markers);

// Recomputes segments from the token texts and observation kinds, then
// writes each token's kind and loss mask from the segment it falls in.
void apply_segmentation(Rollout& rollout);

// Builds one ToolCallRecord per ToolAction segment (k = 1..n). Existing
// per-call annotations are dropped; entropies are filled by the entropy
// module.
void attach_tool_records(Rollout& rollout);

// Answer tokens are the content tokens strictly inside ANS_OPEN/ANS_CLOSE.
std::vector<TokenId> extract_answer(const Rollout& rollout);

}  // namespace tepo

#endif  // TEPO_TRAJECTORY_HPP_
