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

#include <set>

#include <gtest/gtest.h>

#include "tepo/error.hpp"
#include "tepo_test_support.hpp"

namespace tepo {
namespace {

using testing::BuildRollout;
using testing::TwoToolVocab;

std::vector<TokenMarker> Markers(const Vocabulary&, std::string_view stream) {
  std::vector<TokenMarker> out;
  std::istringstream in{std::string(stream)};
  std::string w;
  while (in >> w) {
    const bool obs = w.front() == '[';
    out.push_back(MarkerFromText(obs ? w.substr(1, w.size() - 2) : w, obs));
  }
  return out;
}

TEST(SegmentTokens, SingleCallWithTrailingFinish) {
  const auto vocab = TwoToolVocab();
  const auto segs =
      segment_tokens(Markers(vocab, "THINK THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_0] THINK THINK FIN"));
  const std::vector<Segment> expected = {
      {SegmentKind::kReasoning, 0, 2, 0},  {SegmentKind::kToolAction, 2, 5, -1},
      {SegmentKind::kObservation, 5, 6, -1}, {SegmentKind::kReasoning, 6, 8, 1},
      {SegmentKind::kAnswer, 8, 9, -1},
  };
  EXPECT_EQ(segs, expected);
}

TEST(SegmentTokens, NoToolRollout) {
  const auto vocab = TwoToolVocab();
  const auto segs = segment_tokens(Markers(vocab, "THINK THINK ANS_OPEN v_3 ANS_CLOSE FIN"));
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0], (Segment{SegmentKind::kReasoning, 0, 2, 0}));
  EXPECT_EQ(segs[1], (Segment{SegmentKind::kAnswer, 2, 6, -1}));
}

TEST(SegmentTokens, BackToBackCallsLeaveEmptyReasoning) {
  const auto vocab = TwoToolVocab();
  const auto segs = segment_tokens(Markers(
      vocab,
      "THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_0] TOOL_OPEN:noisy key_b TOOL_CLOSE [v_1] "
      "ANS_OPEN v_0 ANS_CLOSE FIN"));
  // r_0, a_1, o_1, r_1 (empty), a_2, o_2, r_2 (empty), answer.
  ASSERT_EQ(segs.size(), 8u);
  EXPECT_EQ(segs[3], (Segment{SegmentKind::kReasoning, 5, 5, 1}));
  EXPECT_EQ(segs[6], (Segment{SegmentKind::kReasoning, 9, 9, 2}));
}

TEST(SegmentTokens, MalformedStreams) {
  const auto vocab = TwoToolVocab();
  for (const char* bad : {
           "THINK TOOL_OPEN:good key_a [v_0] FIN",           // missing close
           "THINK [v_0] FIN",                                // observation without action
           "THINK TOOL_OPEN:good key_a TOOL_CLOSE THINK FIN",  // action without observation
           "ANS_OPEN v_0 FIN",                               // unterminated answer
           "THINK ANS_CLOSE FIN",                            // stray close
           "ANS_OPEN v_0 ANS_CLOSE FIN THINK",               // tokens after FIN
       }) {
    try {
      segment_tokens(Markers(vocab, bad));
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedTrajectory) << bad;
    }
  }
}

TEST(AttachToolRecords, OneRecordPerAction) {
  const auto vocab = TwoToolVocab();
  const Rollout r = BuildRollout(
      vocab,
      "THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_0] THINK TOOL_OPEN:noisy key_b TOOL_CLOSE [v_1] "
      "THINK TOOL_OPEN:good key_c TOOL_CLOSE [v_2] THINK ANS_OPEN v_2 ANS_CLOSE FIN");
  ASSERT_EQ(r.num_calls(), 3);
  int action_segments = 0;
  for (const auto& s : r.segments) {
    if (s.kind != SegmentKind::kToolAction) continue;
    const auto& c = r.tool_calls[static_cast<std::size_t>(action_segments)];
    EXPECT_EQ(c.k, action_segments + 1);
    EXPECT_EQ(c.action_start, s.start);
    EXPECT_EQ(c.action_end, s.end);
    ++action_segments;
  }
  EXPECT_EQ(action_segments, 3);
  EXPECT_EQ(r.tool_calls[0].tool, "good");
  EXPECT_EQ(r.tool_calls[1].tool, "noisy");
  EXPECT_EQ(r.tool_calls[1].query, std::vector<TokenId>{vocab.key(1)});
  EXPECT_EQ(r.tool_calls[2].observation, std::vector<TokenId>{vocab.value(2)});
  EXPECT_EQ(extract_answer(r), std::vector<TokenId>{vocab.value(2)});
}

TEST(AttachToolRecords, NoCalls) {
  const auto vocab = TwoToolVocab();
  EXPECT_TRUE(BuildRollout(vocab, "THINK ANS_OPEN v_1 ANS_CLOSE FIN").tool_calls.empty());
}

TEST(SegmentationProperties, CoverageCountsAndMasking) {
  const auto vocab = TwoToolVocab();
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Rollout r = testing::RandomRollout(vocab, rng, {}, "r");
    std::multiset<int> covered;
    int prev_end = 0;
    int next_ordinal = 0;
    int actions = 0;
    int observations = 0;
    for (const auto& s : r.segments) {
      EXPECT_EQ(s.start, prev_end);
      EXPECT_LE(s.start, s.end);
      prev_end = s.end;
      for (int i = s.start; i < s.end; ++i) covered.insert(i);
      if (s.kind == SegmentKind::kReasoning) EXPECT_EQ(s.ordinal, next_ordinal++);
      if (s.kind != SegmentKind::kReasoning) EXPECT_FALSE(s.empty());
      actions += s.kind == SegmentKind::kToolAction;
      observations += s.kind == SegmentKind::kObservation;
    }
    EXPECT_EQ(prev_end, static_cast<int>(r.tokens.size()));
    std::multiset<int> all;
    for (int i = 0; i < static_cast<int>(r.tokens.size()); ++i) all.insert(i);
    EXPECT_EQ(covered, all);
    EXPECT_EQ(actions, r.num_calls());
    EXPECT_EQ(observations, r.num_calls());
    EXPECT_EQ(next_ordinal, r.num_calls() + 1);
    for (const auto& t : r.tokens) {
      EXPECT_EQ(t.loss_masked, t.kind == SegmentKind::kObservation);
    }
    EXPECT_LE(r.num_entropy_decreasing(), r.num_calls());
    for (const auto& c : r.tool_calls) {
      if (c.indicator == 1) EXPECT_LT(c.delta, 0.0);
      if (c.h_pre && c.h_post) EXPECT_DOUBLE_EQ(c.delta, *c.h_post - *c.h_pre);
    }
  }
}

TEST(SegmentKindNames, RoundTrip) {
  for (auto k : {SegmentKind::kReasoning, SegmentKind::kToolAction, SegmentKind::kObservation,
                 SegmentKind::kAnswer}) {
    EXPECT_EQ(SegmentKindFromName(SegmentKindName(k)), k);
  }
  EXPECT_FALSE(SegmentKindFromName("bogus").has_value());
}

}  // namespace
}  // namespace tepo
