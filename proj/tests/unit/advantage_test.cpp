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

#include "tepo/advantage.hpp"

#include <gtest/gtest.h>

#include "tepo/error.hpp"
#include "tepo/reward.hpp"
#include "tepo_test_support.hpp"

namespace tepo {
namespace {

using testing::BuildRollout;
using testing::TwoToolVocab;

TEST(GroupNormalize, TwoPoint) {
  const auto a = group_normalize(std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(a[0], 1.0, 1e-7);
  EXPECT_NEAR(a[1], -1.0, 1e-7);
}

TEST(GroupNormalize, ConstantGroupIsZero) {
  EXPECT_EQ(group_normalize(std::vector<double>{0.5, 0.5, 0.5}),
            (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(GroupNormalize, FourValueOracle) {
  // mean 0.6, population variance 0.095.
  const std::vector<double> v{0.2, 0.4, 0.9, 0.9};
  const auto a = group_normalize(v);
  const double sigma = std::sqrt(0.095);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(a[i], (v[i] - 0.6) / (sigma + 1e-8), 1e-12);
  }
}

TEST(GroupNormalize, EmptyThrows) {
  try {
    group_normalize(std::vector<double>{});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyGroup);
  }
}

TEST(GroupNormalize, ZeroMeanAndScaleLocationInvariance) {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(2 + rng.UniformInt(10));
    for (auto& x : v) x = rng.Uniform();
    const auto a = group_normalize(v, 0.0);
    double mean = 0.0;
    for (double x : a) mean += x;
    EXPECT_LT(std::abs(mean / static_cast<double>(a.size())), 1e-9);
    const double scale = 0.1 + 5.0 * rng.Uniform();
    const double shift = rng.Uniform() - 0.5;
    std::vector<double> w;
    for (double x : v) w.push_back(scale * x + shift);
    const auto b = group_normalize(w, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

std::vector<Rollout> TwoRolloutGroup() {
  const auto vocab = TwoToolVocab();
  Rollout a = BuildRollout(
      vocab, "THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_1] v_1 ANS_OPEN v_1 ANS_CLOSE FIN",
      {1.0, 0.1, 0.1, 0.1, 0.2, 0.0, 0.0, 0.0, 0.0});
  Rollout b = BuildRollout(
      vocab, "THINK TOOL_OPEN:noisy key_a TOOL_CLOSE [v_5] THINK ANS_OPEN v_2 ANS_CLOSE FIN",
      {1.0, 0.1, 0.1, 0.1, 1.5, 0.0, 0.0, 0.0, 0.0});
  a.rollout_id = "q-r0";
  b.rollout_id = "q-r1";
  a.f1 = 1.0;
  b.f1 = 0.5;
  return {annotate_rollout_entropies(a), annotate_rollout_entropies(b)};
}

TEST(AssignSparse, TwoPointComposition) {
  const auto group = TwoRolloutGroup();
  const auto maps = assign_sparse(group, std::vector<double>{1.0, 0.0});
  ASSERT_EQ(maps.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_EQ(maps[i].size(), group[i].tokens.size());
    for (std::size_t t = 0; t < maps[i].size(); ++t) {
      if (group[i].tokens[t].kind == SegmentKind::kObservation) {
        EXPECT_EQ(maps[i].values[t], 0.0);
        EXPECT_TRUE(maps[i].excluded[t]);
      } else {
        EXPECT_NEAR(maps[i].values[t], i == 0 ? 1.0 : -1.0, 1e-7);
        EXPECT_FALSE(maps[i].excluded[t]);
      }
    }
  }
}

TEST(AssignSparse, EqualRewardsGiveNoSignal) {
  const auto group = TwoRolloutGroup();
  for (const auto& m : assign_sparse(group, std::vector<double>{0.3, 0.3})) {
    for (double v : m.values) EXPECT_EQ(v, 0.0);
  }
}

TEST(AssignSparse, SizeMismatch) {
  const auto group = TwoRolloutGroup();
  try {
    assign_sparse(group, std::vector<double>{1.0});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSizeMismatch);
  }
}

TEST(AssignSparse, EightRolloutOracle) {
  const auto vocab = TwoToolVocab();
  Rng rng(31);
  std::vector<Rollout> group;
  for (int i = 0; i < 8; ++i) {
    group.push_back(testing::RandomRollout(vocab, rng, {}, "r" + std::to_string(i)));
  }
  std::vector<double> rewards;
  for (const auto& r : group) {
    rewards.push_back(sparse_reward(*r.f1, r.num_calls(), r.num_entropy_decreasing()));
  }
  const auto maps = assign_sparse(group, rewards);
  const auto oracle = testing::OracleUniformAdvantages(group, false);
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t t = 0; t < oracle[i].size(); ++t) {
      EXPECT_NEAR(maps[i].values[t], oracle[i][t], 1e-12);
    }
  }
}

TEST(BuildToolPool, SizesFollowCallCounts) {
  const auto vocab = TwoToolVocab();
  const std::string call = "TOOL_OPEN:good key_a TOOL_CLOSE [v_1] THINK ";
  std::vector<Rollout> group = {
      BuildRollout(vocab, "THINK " + call + call + "ANS_OPEN v_1 ANS_CLOSE FIN"),
      BuildRollout(vocab, "THINK ANS_OPEN v_1 ANS_CLOSE FIN"),
      BuildRollout(vocab, "THINK " + call + "ANS_OPEN v_1 ANS_CLOSE FIN"),
  };
  group[0].rollout_id = "a";
  group[1].rollout_id = "b";
  group[2].rollout_id = "c";
  const auto pool = build_tool_pool(group, {{0.1, 0.2}, {}, {0.3}});
  ASSERT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool.entries[0].rollout_id, "a");
  EXPECT_EQ(pool.entries[1].k, 2);
  EXPECT_EQ(pool.entries[2].rollout_index, 2);
  EXPECT_DOUBLE_EQ(pool.entries[2].reward, 0.3);

  const std::vector<Rollout> none = {group[1], group[1]};
  EXPECT_EQ(build_tool_pool(none, {{}, {}}).size(), 0u);
}

TEST(AssignDense, TwoRolloutOneCallEach) {
  const auto group = TwoRolloutGroup();
  // Rollout 0's call lowers entropy (1.0 -> 0.2); rollout 1's raises it.
  ASSERT_EQ(group[0].tool_calls[0].indicator, 1);
  ASSERT_EQ(group[1].tool_calls[0].indicator, 0);
  const auto pool = build_tool_pool(
      group, {{dense_tool_reward(1.0, 1, 0.5)}, {dense_tool_reward(0.5, 0, 0.5)}});
  const auto maps = assign_dense(group, pool, std::vector<double>{1.0, 0.5});
  // Pool [1.5, 0.5] -> [+1, -1]; F1 [1.0, 0.5] -> [+1, -1] as well.
  for (std::size_t i = 0; i < 2; ++i) {
    const double sign = i == 0 ? 1.0 : -1.0;
    for (int t = 0; t < 4; ++t) EXPECT_NEAR(maps[i].values[static_cast<std::size_t>(t)], sign, 1e-7);
    EXPECT_EQ(maps[i].values[4], 0.0);
    EXPECT_TRUE(maps[i].excluded[4]);
    for (std::size_t t = 5; t < maps[i].size(); ++t) EXPECT_NEAR(maps[i].values[t], sign, 1e-7);
  }
}

TEST(AssignDense, ToolAndOutcomeAdvantagesAreSeparate) {
  auto group = TwoRolloutGroup();
  // Equal F1: outcome advantages vanish while the tool pool still differs.
  group[1].f1 = 1.0;
  const auto pool = build_tool_pool(group, {{1.5}, {1.0}});
  const auto maps = assign_dense(group, pool, std::vector<double>{1.0, 1.0});
  EXPECT_NEAR(maps[0].values[0], 1.0, 1e-7);
  EXPECT_NEAR(maps[1].values[0], -1.0, 1e-7);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t t = 5; t < maps[i].size(); ++t) EXPECT_EQ(maps[i].values[t], 0.0);
  }
}

TEST(AssignDense, CallFreeRolloutsGetOutcomeAdvantage) {
  const auto vocab = TwoToolVocab();
  auto group = TwoRolloutGroup();
  Rollout plain = BuildRollout(vocab, "THINK ANS_OPEN v_1 ANS_CLOSE FIN", {0.3, 0, 0, 0, 0});
  plain.rollout_id = "q-r2";
  plain.f1 = 0.0;
  group.push_back(annotate_rollout_entropies(plain));
  const auto pool = build_tool_pool(group, {{1.5}, {0.5}, {}});
  const std::vector<double> f1s{1.0, 0.5, 0.0};
  const auto maps = assign_dense(group, pool, f1s);
  const auto outcome = group_normalize(f1s);
  for (double v : maps[2].values) EXPECT_DOUBLE_EQ(v, outcome[2]);
}

TEST(AssignDense, EmptyOrSingletonPoolGivesZeroToolAdvantage) {
  const auto vocab = TwoToolVocab();
  auto group = TwoRolloutGroup();
  Rollout plain = annotate_rollout_entropies(
      BuildRollout(vocab, "THINK ANS_OPEN v_1 ANS_CLOSE FIN", {0.3}));
  plain.f1 = 0.0;
  const std::vector<Rollout> singleton = {group[0], plain};
  const auto maps = assign_dense(singleton, build_tool_pool(singleton, {{1.5}, {}}),
                                 std::vector<double>{1.0, 0.0});
  for (int t = 0; t < 4; ++t) EXPECT_EQ(maps[0].values[static_cast<std::size_t>(t)], 0.0);
  EXPECT_NEAR(maps[0].values.back(), 1.0, 1e-7);

  const std::vector<Rollout> empty = {plain, plain};
  const auto m2 = assign_dense(empty, build_tool_pool(empty, {{}, {}}),
                               std::vector<double>{0.0, 1.0});
  EXPECT_NEAR(m2[1].values[0], 1.0, 1e-7);
}

TEST(AssignDense, RequiresEntropyAnnotations) {
  const auto vocab = TwoToolVocab();
  Rollout raw = BuildRollout(vocab, "THINK TOOL_OPEN:good key_a TOOL_CLOSE [v_1] THINK FIN");
  const std::vector<Rollout> group = {raw, raw};
  try {
    assign_dense(group, build_tool_pool(group, {{1.0}, {1.0}}), std::vector<double>{1, 1});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEntropyAnnotation);
  }
}

TEST(AssignDense, CoverageAndMaskingOnRandomGroups) {
  const auto vocab = TwoToolVocab();
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rollout> group;
    std::vector<std::vector<double>> tool_rewards;
    std::vector<double> f1s;
    for (int i = 0; i < 4; ++i) {
      group.push_back(testing::RandomRollout(vocab, rng, {}, "r" + std::to_string(i)));
      f1s.push_back(*group.back().f1);
      tool_rewards.emplace_back();
      for (const auto& c : group.back().tool_calls) {
        tool_rewards.back().push_back(dense_tool_reward(f1s.back(), c.indicator, 0.5));
      }
    }
    const auto maps = assign_dense(group, build_tool_pool(group, tool_rewards), f1s);
    const auto oracle = testing::OracleDenseAdvantages(group, 0.5);
    for (std::size_t i = 0; i < group.size(); ++i) {
      ASSERT_EQ(maps[i].size(), group[i].tokens.size());
      for (std::size_t t = 0; t < maps[i].size(); ++t) {
        const bool obs = group[i].tokens[t].kind == SegmentKind::kObservation;
        EXPECT_EQ(maps[i].excluded[t], obs);
        if (obs) EXPECT_EQ(maps[i].values[t], 0.0);
        EXPECT_NEAR(maps[i].values[t], oracle[i][t], 1e-10);
      }
    }
  }
}

}  // namespace
}  // namespace tepo
