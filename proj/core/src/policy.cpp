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

#include "tepo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tepo/entropy.hpp"
#include "tepo/error.hpp"

namespace tepo {

bool PolicyParams::all_finite() const {
  return std::all_of(weights.begin(), weights.end(),
                     [](double w) { return std::isfinite(w); });
}

Policy::Policy(Vocabulary vocab, DecodingConfig decoding)
    : vocab_(std::move(vocab)),
      machine_(vocab_, decoding),
      feature_dim_(vocab_.size() + vocab_.num_keys() +
                   vocab_.num_tools() * vocab_.size() + 1) {}

PolicyParams Policy::init_params(double scale, std::uint64_t seed) const {
  PolicyParams p = zero_params();
  if (scale == 0.0) return p;
  Rng rng = Rng::Derive(seed, Stream::kInit);
  for (double& w : p.weights) w = scale * rng.Normal();
  return p;
}

DecodeContext Policy::initial_context(int question_key) const {
  DecodeContext ctx;
  ctx.last_token = vocab_.pad();
  ctx.question_key = question_key;
  return ctx;
}

int Policy::observation_slot(const DecodeContext& ctx) const {
  if (ctx.latest_observation < 0) return vocab_.num_tools() * vocab_.size();
  const int tool = std::max(ctx.observation_tool, 0);
  return tool * vocab_.size() + ctx.latest_observation;
}

std::array<int, 3> Policy::active_features(const DecodeContext& ctx) const {
  const int v = vocab_.size();
  return {ctx.last_token, v + ctx.question_key,
          v + vocab_.num_keys() + observation_slot(ctx)};
}

std::vector<double> Policy::features(const DecodeContext& ctx) const {
  std::vector<double> phi(static_cast<std::size_t>(feature_dim_), 0.0);
  for (int f : active_features(ctx)) phi[static_cast<std::size_t>(f)] = 1.0;
  return phi;
}

std::vector<double> Policy::next_token_dist(const PolicyParams& params,
                                            const DecodeContext& ctx) const {
  if (params.rows != vocab_size() || params.cols != feature_dim_) {
    throw Error(ErrorCode::kShapeMismatch, "parameter shape does not match policy");
  }
  const auto mask = machine_.legal_mask(ctx.fsm);
  const auto active = active_features(ctx);
  std::vector<double> dist(static_cast<std::size_t>(vocab_size()), 0.0);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < vocab_size(); ++v) {
    if (!mask[static_cast<std::size_t>(v)]) continue;
    double z = 0.0;
    for (int f : active) z += params.at(v, f);
    dist[static_cast<std::size_t>(v)] = z;
    max_logit = std::max(max_logit, z);
  }
  if (max_logit == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kAllMasked, "no legal token in current state");
  }
  double sum = 0.0;
  for (int v = 0; v < vocab_size(); ++v) {
    auto& p = dist[static_cast<std::size_t>(v)];
    if (!mask[static_cast<std::size_t>(v)]) continue;
    p = std::exp(p - max_logit);
    sum += p;
  }
  for (double& p : dist) p /= sum;
  return dist;
}

SampledToken Policy::sample_token(const PolicyParams& params,
                                  const DecodeContext& ctx, Rng& rng) const {
  const auto dist = next_token_dist(params, ctx);
  const double u = rng.Uniform();
  double cum = 0.0;
  TokenId chosen = -1;
  for (int v = 0; v < vocab_size(); ++v) {
    const double p = dist[static_cast<std::size_t>(v)];
    if (p <= 0.0) continue;
    chosen = v;
    cum += p;
    if (u < cum) break;
  }
  SampledToken out;
  out.token = chosen;
  out.logprob = std::log(dist[static_cast<std::size_t>(chosen)]);
  out.entropy = token_entropy(dist);
  return out;
}

double Policy::log_prob(const PolicyParams& params, const DecodeContext& ctx,
                        TokenId token) const {
  const auto dist = next_token_dist(params, ctx);
  if (token < 0 || token >= vocab_size() || dist[static_cast<std::size_t>(token)] <= 0.0) {
    throw Error(ErrorCode::kIllegalToken,
                "token " + std::to_string(token) + " has zero probability");
  }
  return std::log(dist[static_cast<std::size_t>(token)]);
}

PolicyParams Policy::grad_log_prob(const PolicyParams& params,
                                   const DecodeContext& ctx, TokenId token) const {
  if (!machine_.is_legal(ctx.fsm, token)) {
    throw Error(ErrorCode::kIllegalToken,
                "token " + std::to_string(token) + " not legal in context");
  }
  const auto dist = next_token_dist(params, ctx);
  PolicyParams grad = zero_params();
  accumulate_grad_log_prob(ctx, token, dist, 1.0, grad);
  return grad;
}

void Policy::accumulate_grad_log_prob(const DecodeContext& ctx, TokenId token,
                                      std::span<const double> dist, double scale,
                                      PolicyParams& grad) const {
  // d log p_token / d z_v = [v == token] - p_v over legal rows; illegal rows
  // have p_v = 0 and never equal the token.
  const auto active = active_features(ctx);
  for (int v = 0; v < vocab_size(); ++v) {
    const double p = dist[static_cast<std::size_t>(v)];
    const double g = (v == token ? 1.0 : 0.0) - p;
    if (g == 0.0) continue;
    for (int f : active) grad.at(v, f) += scale * g;
  }
}

DecodeContext Policy::after_token(const DecodeContext& ctx, TokenId token) const {
  DecodeContext next = ctx;
  next.fsm = machine_.advance(ctx.fsm, token);
  if (vocab_.is_key(token)) next.last_token = token;
  return next;
}

DecodeContext Policy::after_observation(const DecodeContext& ctx,
                                        TokenId observation, int tool) const {
  DecodeContext next = ctx;
  if (ctx.fsm.phase == Phase::kAwaitObservation) next.fsm = machine_.observe(ctx.fsm);
  next.latest_observation = observation;
  next.observation_tool = tool;
  return next;
}

std::vector<DecodeContext> Policy::replay_contexts(const Rollout& rollout) const {
  if (rollout.question_key < 0 || rollout.question_key >= vocab_.num_keys()) {
    throw Error(ErrorCode::kMalformedTrajectory,
                "rollout " + rollout.rollout_id + " has no valid question key");
  }
  std::vector<DecodeContext> out;
  out.reserve(rollout.tokens.size());
  DecodeContext ctx = initial_context(rollout.question_key);
  int pending_tool = 0;
  for (const auto& t : rollout.tokens) {
    out.push_back(ctx);
    if (t.kind == SegmentKind::kObservation) {
      ctx = after_observation(ctx, t.token_id, pending_tool);
      continue;
    }
    if (auto tool = vocab_.tool_of(t.token_id)) pending_tool = *tool;
    ctx = after_token(ctx, t.token_id);
  }
  return out;
}

}  // namespace tepo
