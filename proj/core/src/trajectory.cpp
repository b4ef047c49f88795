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

#include "tepo/trajectory.hpp"

#include <algorithm>

#include "tepo/error.hpp"

namespace tepo {

std::string_view SegmentKindName(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kReasoning: return "reasoning";
    case SegmentKind::kToolAction: return "tool_action";
    case SegmentKind::kObservation: return "observation";
    case SegmentKind::kAnswer: return "answer";
  }
  return "reasoning";
}

std::optional<SegmentKind> SegmentKindFromName(std::string_view name) {
  if (name == "reasoning") return SegmentKind::kReasoning;
  if (name == "tool_action") return SegmentKind::kToolAction;
  if (name == "observation") return SegmentKind::kObservation;
  if (name == "answer") return SegmentKind::kAnswer;
  return std::nullopt;
}

int Rollout::num_entropy_decreasing() const {
  return static_cast<int>(std::count_if(
      tool_calls.begin(), tool_calls.end(),
      [](const ToolCallRecord& c) { return c.indicator == 1; }));
}

const Segment* Rollout::reasoning_segment(int ordinal) const {
  for (const auto& s : segments) {
    if (s.kind == SegmentKind::kReasoning && s.ordinal == ordinal) return &s;
  }
  return nullptr;
}

namespace {

enum class ParseState {
  kReasoning,
  kInAction,
  kExpectObservation,
  kInObservation,
  kInAnswer,
  kAfterAnswerClose,
  kDone,
};

[[noreturn]] void Malformed(int pos, const std::string& what) {
  throw Error(ErrorCode::kMalformedTrajectory,
              "token " + std::to_string(pos) + ": " + what);
}

}  // namespace

std::vector<Segment> segment_tokens(std::span<const TokenMarker> markers) {
  std::vector<Segment> out;
  ParseState state = ParseState::kReasoning;
  int ordinal = 0;
  int start = 0;

  auto close = [&](SegmentKind kind, int end, int ord = -1) {
    out.push_back(Segment{kind, start, end, ord});
    start = end;
  };

  const int n = static_cast<int>(markers.size());
  for (int i = 0; i < n; ++i) {
    const TokenMarker m = markers[static_cast<std::size_t>(i)];
    switch (state) {
      case ParseState::kReasoning:
        switch (m) {
          case TokenMarker::kContent:
            break;
          case TokenMarker::kToolOpen:
            close(SegmentKind::kReasoning, i, ordinal);
            state = ParseState::kInAction;
            break;
          case TokenMarker::kAnswerOpen:
            close(SegmentKind::kReasoning, i, ordinal);
            state = ParseState::kInAnswer;
            break;
          case TokenMarker::kFinish:
            close(SegmentKind::kReasoning, i, ordinal);
            close(SegmentKind::kAnswer, i + 1);
            state = ParseState::kDone;
            break;
          case TokenMarker::kObservation:
            Malformed(i, "observation without a preceding tool action");
          case TokenMarker::kToolClose:
            Malformed(i, "TOOL_CLOSE without TOOL_OPEN");
          case TokenMarker::kAnswerClose:
            Malformed(i, "ANS_CLOSE without ANS_OPEN");
        }
        break;
      case ParseState::kInAction:
        if (m == TokenMarker::kToolClose) {
          close(SegmentKind::kToolAction, i + 1);
          state = ParseState::kExpectObservation;
        } else if (m != TokenMarker::kContent) {
          Malformed(i, "unexpected marker inside tool action");
        }
        break;
      case ParseState::kExpectObservation:
        if (m != TokenMarker::kObservation) {
          Malformed(i, "tool action not followed by an observation");
        }
        state = ParseState::kInObservation;
        break;
      case ParseState::kInObservation:
        if (m == TokenMarker::kObservation) break;
        close(SegmentKind::kObservation, i);
        ++ordinal;
        state = ParseState::kReasoning;
        --i;  // reprocess as reasoning
        break;
      case ParseState::kInAnswer:
        if (m == TokenMarker::kAnswerClose) {
          state = ParseState::kAfterAnswerClose;
        } else if (m != TokenMarker::kContent) {
          Malformed(i, "unexpected marker inside answer");
        }
        break;
      case ParseState::kAfterAnswerClose:
        if (m != TokenMarker::kFinish) Malformed(i, "expected FIN after ANS_CLOSE");
        close(SegmentKind::kAnswer, i + 1);
        state = ParseState::kDone;
        break;
      case ParseState::kDone:
        Malformed(i, "token after FIN");
    }
  }

  switch (state) {
    case ParseState::kReasoning:
      close(SegmentKind::kReasoning, n, ordinal);
      break;
    case ParseState::kInObservation:
      close(SegmentKind::kObservation, n);
      ++ordinal;
      close(SegmentKind::kReasoning, n, ordinal);
      break;
    case ParseState::kAfterAnswerClose:
      // Answer closed but the stream was cut before FIN.
      close(SegmentKind::kAnswer, n);
      break;
    case ParseState::kDone:
      break;
    case ParseState::kInAction:
      Malformed(n, "unterminated tool action");
    case ParseState::kExpectObservation:
      Malformed(n, "tool action not followed by an observation");
    case ParseState::kInAnswer:
      Malformed(n, "unterminated answer");
  }
  return out;
}

void apply_segmentation(Rollout& rollout) {
  std::vector<TokenMarker> markers;
  markers.reserve(rollout.tokens.size());
  for (const auto& t : rollout.tokens) {
    markers.push_back(
        MarkerFromText(t.text, t.kind == SegmentKind::kObservation));
  }
  rollout.segments = segment_tokens(markers);
  for (const auto& s : rollout.segments) {
    for (int i = s.start; i < s.end; ++i) {
      auto& t = rollout.tokens[static_cast<std::size_t>(i)];
      t.position = i;
      t.kind = s.kind;
      t.loss_masked = (s.kind == SegmentKind::kObservation);
    }
  }
}

void attach_tool_records(Rollout& rollout) {
  std::vector<ToolCallRecord> calls;
  const auto& segs = rollout.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].kind != SegmentKind::kToolAction) continue;
    ToolCallRecord rec;
    rec.k = static_cast<int>(calls.size()) + 1;
    rec.action_start = segs[i].start;
    rec.action_end = segs[i].end;
    const auto& opener = rollout.tokens[static_cast<std::size_t>(rec.action_start)];
    if (auto colon = opener.text.find(':'); colon != std::string::npos) {
      rec.tool = opener.text.substr(colon + 1);
    }
    for (int t = rec.action_start + 1; t < rec.action_end - 1; ++t) {
      rec.query.push_back(rollout.tokens[static_cast<std::size_t>(t)].token_id);
    }
    if (i + 1 < segs.size() && segs[i + 1].kind == SegmentKind::kObservation) {
      for (int t = segs[i + 1].start; t < segs[i + 1].end; ++t) {
        rec.observation.push_back(
            rollout.tokens[static_cast<std::size_t>(t)].token_id);
      }
    }
    calls.push_back(std::move(rec));
  }
  rollout.tool_calls = std::move(calls);
}

std::vector<TokenId> extract_answer(const Rollout& rollout) {
  std::vector<TokenId> out;
  for (const auto& s : rollout.segments) {
    if (s.kind != SegmentKind::kAnswer) continue;
    for (int i = s.start; i < s.end; ++i) {
      const auto& t = rollout.tokens[static_cast<std::size_t>(i)];
      if (MarkerFromText(t.text, false) == TokenMarker::kContent) {
        out.push_back(t.token_id);
      }
    }
  }
  return out;
}

}  // namespace tepo
