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

#ifndef TEPO_GRPO_HPP_
#define TEPO_GRPO_HPP_

#include <optional>
#include <span>
#include <vector>

#include "tepo/advantage.hpp"
#include "tepo/policy.hpp"
#include "tepo/trajectory.hpp"

namespace tepo {

struct ObjectiveConfig {
  // KL coefficient against the reference policy.
  double beta = 0.0;
  // PPO-style ratio clipping; nullopt gives the plain ratio-weighted surrogate.
  std::optional<double> clip_epsilon = 0.2;
  int minibatch_epochs = 1;
};

void validate(const ObjectiveConfig& config);

// exp(logprob_new - logprob_old). Throws Error(kNonFinite).
double importance_ratio(double logprob_new, double logprob_old);

// ratio * A, or min(ratio * A, clamp(ratio, 1 - eps, 1 + eps) * A) when
// clipping is enabled.
double token_term(double ratio, double advantage, std::optional<double> clip_epsilon);

// KL(p_new || p_ref) for two distributions over the same vocabulary.
// Throws Error(kSupportMismatch) if p_ref is 0 where p_new is positive.
double kl_divergence(std::span<const double> p_new, std::span<const double> p_ref);

// Mean over contexts of KL(pi_new(.|ctx) || pi_ref(.|ctx)).
double kl_penalty(const Policy& policy, const PolicyParams& params_new,
                  const PolicyParams& params_ref,
                  std::span<const DecodeContext> contexts);

struct ObjectiveResult {
  double value = 0.0;
  double surrogate = 0.0;
  double kl = 0.0;
  PolicyParams gradient;
};

// Token-level group objective
//   J = (1/N) sum_i sum_{t not masked} term(rho_it, A_it) - beta * KL
// with rho_it computed against each token's stored logprob_old, and its
// exact gradient with respect to W. The KL is averaged over the contexts of
// all non-masked tokens in the group and taken against `reference`.
// Throws Error(kShapeMismatch) if maps and rollouts do not line up.
ObjectiveResult objective_and_gradient(const Policy& policy,
                                       std::span<const Rollout> group,
                                       std::span<const AdvantageMap> advantages,
                                       const PolicyParams& params,
                                       const PolicyParams& reference,
                                       const ObjectiveConfig& config);

// Expectation over questions: the mean of the per-group objectives.
ObjectiveResult batch_objective_and_gradient(
    const Policy& policy, std::span<const std::vector<Rollout>> groups,
    std::span<const std::vector<AdvantageMap>> advantages, const PolicyParams& params,
    const PolicyParams& reference, const ObjectiveConfig& config);

}  // namespace tepo

#endif  // TEPO_GRPO_HPP_
