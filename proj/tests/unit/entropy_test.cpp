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

#include "tepo/entropy.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "tepo/error.hpp"
#include "tepo_test_support.hpp"

namespace tepo {
namespace {

using testing::BuildRollout;
using testing::TwoToolVocab;

TEST(TokenEntropy, UniformIsLogSize) {
  const std::vector<double> p(4, 0.25);
  EXPECT_NEAR(token_entropy(p), 1.3862944, 1e-7);
  const std::vector<double> big(23, 1.0 / 23.0);
  EXPECT_NEAR(token_entropy(big), std::log(23.0), 1e-12);
}

TEST(TokenEntropy, OneHotIsZero) {
  EXPECT_EQ(token_entropy(std::vector<double>{0.0, 1.0, 0.0}), 0.0);
}

TEST(TokenEntropy, TwoPointUniform) {
  EXPECT_NEAR(token_entropy(std::vector<double>{0.5, 0.5, 0.0, 0.0}), 0.6931472, 1e-7);
}

TEST(TokenEntropy, RejectsInvalidDistributions) {
  for (const auto& bad : {std::vector<double>{0.5, 0.6}, std::vector<double>{1.2, -0.2},
                          std::vector<double>{}}) {
    try {
      token_entropy(bad);
      ADD_FAILURE() << "accepted an invalid distribution";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDistribution);
    }
  }
  // Within the 1e-9 normalization tolerance.
  EXPECT_NO_THROW(token_entropy(std::vector<double>{0.5, 0.5 + 5e-10}));
}

TEST(TokenEntropy, BoundedByLogSupportOnRandomDistributions) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.UniformInt(30));
    std::vector<double> p(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& x : p) {
      x = rng.Uniform() < 0.2 ? 0.0 : rng.Uniform();
      s += x;
    }
    if (s == 0.0) continue;
    for (auto& x : p) x /= s;
    const double h = token_entropy(p);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST(SegmentEntropy, MeanOfTokenEntropies) {
  const auto vocab = TwoToolVocab();
  const Rollout r = BuildRollout(vocab, "THINK v_1 ANS_OPEN v_1 ANS_CLOSE FIN", {1.0, 2.0});
  EXPECT_DOUBLE_EQ(*segment_entropy(r, r.segments[0]), 1.5);
  const Rollout single = BuildRollout(vocab, "THINK ANS_OPEN v_1 ANS_CLOSE FIN", {0.7});
  EXPECT_DOUBLE_EQ(*segment_entropy(single, single.segments[0]), 0.7);
}

TEST(SegmentEntropy, EmptySegmentIsAbsent) {
  const auto vocab = TwoToolVocab();
  const Rollout r = BuildRollout(
      vocab, "THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_1] TOOL_OPEN:good key_a TOOL_CLOSE [v_1]");
  const Segment* r1 = r.reasoning_segment(1);
  ASSERT_NE(r1, nullptr);
  EXPECT_TRUE(r1->empty());
  EXPECT_FALSE(segment_entropy(r, *r1).has_value());
}

TEST(SegmentEntropy, BetweenMinAndMaxTokenEntropy) {
  const auto vocab = TwoToolVocab();
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Rollout r = testing::RandomRollout(vocab, rng, {}, "r");
    for (const auto& s : r.segments) {
      if (s.kind != SegmentKind::kReasoning || s.empty()) continue;
      double lo = 1e9;
      double hi = -1e9;
      for (int i = s.start; i < s.end; ++i) {
        lo = std::min(lo, r.tokens[static_cast<std::size_t>(i)].entropy);
        hi = std::max(hi, r.tokens[static_cast<std::size_t>(i)].entropy);
      }
      const double h = *segment_entropy(r, s);
      EXPECT_GE(h, lo - 1e-12);
      EXPECT_LE(h, hi + 1e-12);
    }
  }
}

TEST(DeltaSegmentEntropy, Examples) {
  EXPECT_NEAR(delta_segment_entropy(1.0, 0.8), -0.2, 1e-15);
  EXPECT_EQ(delta_segment_entropy(0.37, 0.37), 0.0);
  EXPECT_NEAR(delta_segment_entropy(0.5, 0.9), 0.4, 1e-15);
}

TEST(DeltaSegmentEntropy, AbsentSideIsUndefined) {
  try {
    delta_segment_entropy(std::nullopt, 0.5);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedDelta);
  }
  EXPECT_THROW(delta_segment_entropy(0.5, std::nullopt), Error);
}

TEST(DeltaRatio, Examples) {
  EXPECT_NEAR(*delta_ratio(1.0, 0.8, 1e-8), -0.2 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(*delta_ratio(1.0, 0.8, 1e-8), -0.19999999, 1e-8);
  EXPECT_FALSE(delta_ratio(0.0, 0.0, 1e-8).has_value());
  EXPECT_NEAR(*delta_ratio(2.0, 1.0, 1e-8), -0.5, 1e-8);
  EXPECT_FALSE(delta_ratio(0.5, 0.9).has_value());
}

TEST(Indicator, Examples) {
  EXPECT_EQ(entropy_decrease_indicator(-0.2), 1);
  EXPECT_EQ(entropy_decrease_indicator(0.0), 0);
  EXPECT_EQ(entropy_decrease_indicator(0.3), 0);
  EXPECT_EQ(entropy_decrease_indicator(std::nullopt), 0);
}

TEST(Annotate, SingleCall) {
  const auto vocab = TwoToolVocab();
  Rollout r = BuildRollout(
      vocab, "THINK THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_2] v_2 v_2 ANS_OPEN v_2 ANS_CLOSE FIN",
      {1.0, 1.0, 0.0, 0.0, 0.0, 0.4, 0.6});
  r = annotate_rollout_entropies(std::move(r));
  ASSERT_EQ(r.num_calls(), 1);
  const auto& c = r.tool_calls[0];
  EXPECT_TRUE(c.entropy_annotated);
  EXPECT_DOUBLE_EQ(*c.h_pre, 1.0);
  EXPECT_DOUBLE_EQ(*c.h_post, 0.5);
  EXPECT_DOUBLE_EQ(c.delta, -0.5);
  EXPECT_EQ(c.indicator, 1);
  EXPECT_NEAR(*c.ratio, -0.5 / (1.0 + 1e-8), 1e-15);
  EXPECT_FALSE(c.degenerate);
}

TEST(Annotate, BackToBackCallIsDegenerate) {
  const auto vocab = TwoToolVocab();
  Rollout r = BuildRollout(vocab,
                           "THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_1] TOOL_OPEN:noisy key_a "
                           "TOOL_CLOSE [v_4] THINK ANS_OPEN v_1 ANS_CLOSE FIN",
                           {2.0, 0, 0, 0, 0, 0, 0, 0.1});
  r = annotate_rollout_entropies(std::move(r));
  ASSERT_EQ(r.num_calls(), 2);
  for (const auto& c : r.tool_calls) {
    EXPECT_TRUE(c.degenerate);
    EXPECT_EQ(c.indicator, 0);
    EXPECT_EQ(c.delta, 0.0);
    EXPECT_FALSE(c.ratio.has_value());
  }
  EXPECT_EQ(r.num_entropy_decreasing(), 0);
}

// Brute-force check on random multi-call rollouts against the text-walking
// oracle; includes degenerate and truncated shapes.
TEST(Annotate, MatchesOracleOnRandomRollouts) {
  const auto vocab = TwoToolVocab();
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Rollout r = testing::RandomRollout(vocab, rng, {}, "r");
    const auto oracle = testing::OracleCalls(r);
    ASSERT_EQ(oracle.size(), r.tool_calls.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      const auto& c = r.tool_calls[k];
      const auto& o = oracle[k];
      EXPECT_EQ(c.indicator, o.indicator);
      EXPECT_EQ(c.degenerate, !o.delta.has_value());
      EXPECT_NEAR(c.delta, o.delta.value_or(0.0), 1e-12);
      ASSERT_EQ(c.ratio.has_value(), o.ratio.has_value());
      if (o.ratio) EXPECT_NEAR(*c.ratio, *o.ratio, 1e-12);
      // Indicator consistency and ratio sign.
      EXPECT_EQ(c.indicator == 1, !c.degenerate && c.delta < 0);
      if (c.ratio) EXPECT_LT(*c.ratio, 0.0);
    }
  }
}

TEST(Annotate, CommonOffsetLeavesDeltasUnchanged) {
  const auto vocab = TwoToolVocab();
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Rollout r = testing::RandomRollout(vocab, rng, {}, "r");
    Rollout shifted = r;
    for (auto& t : shifted.tokens) t.entropy += 0.75;
    shifted = annotate_rollout_entropies(std::move(shifted));
    for (std::size_t k = 0; k < r.tool_calls.size(); ++k) {
      EXPECT_NEAR(shifted.tool_calls[k].delta, r.tool_calls[k].delta, 1e-12);
    }
  }
}

}  // namespace
}  // namespace tepo
