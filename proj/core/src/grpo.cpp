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

#include "tepo/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tepo/error.hpp"

namespace tepo {

void validate(const ObjectiveConfig& config) {
  if (!(config.beta >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "training.beta must be >= 0");
  }
  if (config.clip_epsilon &&
      !(*config.clip_epsilon > 0.0 && *config.clip_epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "training.clip_epsilon must be in (0, 1)");
  }
  if (config.minibatch_epochs < 1) {
    throw Error(ErrorCode::kInvalidConfig, "training.minibatch_epochs must be >= 1");
  }
}

double importance_ratio(double logprob_new, double logprob_old) {
  if (!std::isfinite(logprob_new) || !std::isfinite(logprob_old)) {
    throw Error(ErrorCode::kNonFinite, "non-finite log-probability");
  }
  return std::exp(logprob_new - logprob_old);
}

double token_term(double ratio, double advantage, std::optional<double> clip_epsilon) {
  const double unclipped = ratio * advantage;
  if (!clip_epsilon) return unclipped;
  const double clipped =
      std::clamp(ratio, 1.0 - *clip_epsilon, 1.0 + *clip_epsilon) * advantage;
  return std::min(unclipped, clipped);
}

double kl_divergence(std::span<const double> p_new, std::span<const double> p_ref) {
  if (p_new.size() != p_ref.size()) {
    throw Error(ErrorCode::kSupportMismatch, "distributions differ in size");
  }
  double kl = 0.0;
  for (std::size_t v = 0; v < p_new.size(); ++v) {
    if (p_new[v] <= 0.0) continue;
    if (p_ref[v] <= 0.0) {
      throw Error(ErrorCode::kSupportMismatch,
                  "reference assigns zero probability to token " + std::to_string(v));
    }
    kl += p_new[v] * (std::log(p_new[v]) - std::log(p_ref[v]));
  }
  return kl;
}

double kl_penalty(const Policy& policy, const PolicyParams& params_new,
                  const PolicyParams& params_ref,
                  std::span<const DecodeContext> contexts) {
  if (contexts.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ctx : contexts) {
    total += kl_divergence(policy.next_token_dist(params_new, ctx),
                           policy.next_token_dist(params_ref, ctx));
  }
  return total / static_cast<double>(contexts.size());
}

namespace {

void AddKlGradient(const Policy& policy, const DecodeContext& ctx,
                   std::span<const double> p, std::span<const double> q,
                   double kl, double scale, PolicyParams& grad) {
  // dKL/dz_v = p_v (log p_v - log q_v - KL)
  const auto active = policy.active_features(ctx);
  for (int v = 0; v < policy.vocab_size(); ++v) {
    const auto i = static_cast<std::size_t>(v);
    if (p[i] <= 0.0) continue;
    const double g = p[i] * (std::log(p[i]) - std::log(q[i]) - kl);
    for (int f : active) grad.at(v, f) += scale * g;
  }
}

}  // namespace

ObjectiveResult objective_and_gradient(const Policy& policy,
                                       std::span<const Rollout> group,
                                       std::span<const AdvantageMap> advantages,
                                       const PolicyParams& params,
                                       const PolicyParams& reference,
                                       const ObjectiveConfig& config) {
  if (group.size() != advantages.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one advantage map per rollout expected");
  }
  if (params.rows != policy.vocab_size() || params.cols != policy.feature_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter shape does not match policy");
  }
  ObjectiveResult result;
  result.gradient = policy.zero_params();
  if (group.empty()) return result;

  const double inv_n = 1.0 / static_cast<double>(group.size());
  const bool use_kl = config.beta > 0.0;
  std::vector<DecodeContext> kl_contexts;

  for (std::size_t i = 0; i < group.size(); ++i) {
    const Rollout& r = group[i];
    const AdvantageMap& adv = advantages[i];
    if (adv.size() != r.tokens.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "advantage map length differs from rollout " + r.rollout_id);
    }
    const auto contexts = policy.replay_contexts(r);
    for (std::size_t t = 0; t < r.tokens.size(); ++t) {
      const TokenRecord& tok = r.tokens[t];
      if (tok.loss_masked || adv.excluded[t]) continue;
      const auto dist = policy.next_token_dist(params, contexts[t]);
      const double p = dist[static_cast<std::size_t>(tok.token_id)];
      if (!(p > 0.0)) {
        throw Error(ErrorCode::kIllegalToken,
                    "rollout " + r.rollout_id + " token " + std::to_string(t) +
                        " has zero probability");
      }
      const double ratio = importance_ratio(std::log(p), tok.logprob_old);
      const double a = adv.values[t];
      result.surrogate += inv_n * token_term(ratio, a, config.clip_epsilon);

      bool gradient_flows = true;
      if (config.clip_epsilon) {
        const double clipped =
            std::clamp(ratio, 1.0 - *config.clip_epsilon, 1.0 + *config.clip_epsilon) * a;
        gradient_flows = ratio * a <= clipped;
      }
      // d(rho A)/dW = rho A dlog pi/dW
      if (gradient_flows && a != 0.0) {
        policy.accumulate_grad_log_prob(contexts[t], tok.token_id, dist,
                                        inv_n * ratio * a, result.gradient);
      }
      if (use_kl) kl_contexts.push_back(contexts[t]);
    }
  }

  if (use_kl && !kl_contexts.empty()) {
    const double inv_c = 1.0 / static_cast<double>(kl_contexts.size());
    double kl_total = 0.0;
    for (const auto& ctx : kl_contexts) {
      const auto p = policy.next_token_dist(params, ctx);
      const auto q = policy.next_token_dist(reference, ctx);
      const double kl = kl_divergence(p, q);
      kl_total += kl;
      AddKlGradient(policy, ctx, p, q, kl, -config.beta * inv_c, result.gradient);
    }
    result.kl = kl_total * inv_c;
  }
  result.value = result.surrogate - config.beta * result.kl;
  return result;
}

ObjectiveResult batch_objective_and_gradient(
    const Policy& policy, std::span<const std::vector<Rollout>> groups,
    std::span<const std::vector<AdvantageMap>> advantages, const PolicyParams& params,
    const PolicyParams& reference, const ObjectiveConfig& config) {
  if (groups.size() != advantages.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one advantage set per group expected");
  }
  ObjectiveResult total;
  total.gradient = policy.zero_params();
  if (groups.empty()) return total;
  const double inv = 1.0 / static_cast<double>(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto r = objective_and_gradient(policy, groups[g], advantages[g], params,
                                    reference, config);
    total.value += inv * r.value;
    total.surrogate += inv * r.surrogate;
    total.kl += inv * r.kl;
    for (std::size_t j = 0; j < total.gradient.weights.size(); ++j) {
      total.gradient.weights[j] += inv * r.gradient.weights[j];
    }
  }
  return total;
}

}  // namespace tepo
