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

#ifndef TEPO_POLICY_HPP_
#define TEPO_POLICY_HPP_

#include <array>
#include <span>
#include <vector>

#include "tepo/decoding.hpp"
#include "tepo/rng.hpp"
#include "tepo/trajectory.hpp"
#include "tepo/vocabulary.hpp"

namespace tepo {

// Weight matrix W of shape |V| x d, row-major.
struct PolicyParams {
  int rows = 0;
  int cols = 0;
  std::vector<double> weights;

  PolicyParams() = default;
  PolicyParams(int rows_, int cols_) : rows(rows_), cols(cols_), weights(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0) {}

  double& at(int r, int c) { return weights[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  double at(int r, int c) const { return weights[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  std::size_t size() const { return weights.size(); }
  bool all_finite() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct DecodeContext {
  // PAD until the first tool query, then the most recently queried key.
  // Reasoning, structural and observation tokens leave it unchanged.
  TokenId last_token = 0;
  int question_key = 0;
  // Latest observation token and the index of the tool that produced it;
  // -1 before any observation.
  TokenId latest_observation = -1;
  int observation_tool = -1;
  FsmState fsm;
};

struct SampledToken {
  TokenId token = 0;
  double logprob = 0.0;
  double entropy = 0.0;
};

// Linear-softmax policy pi(. | ctx) = masked_softmax(W phi(ctx)).
//
// phi(ctx) is one-hot(last_token slot) ++ one-hot(question_key) ++
// one-hot(latest observation), where the observation block is indexed by
// (source tool, token) with a trailing NONE slot. Exactly three entries are
// 1, so d = |V| + K + T|V| + 1; with a single tool this is |V| + K + |V| + 1.
class Policy {
 public:
  Policy(Vocabulary vocab, DecodingConfig decoding);

  const Vocabulary& vocab() const { return vocab_; }
  const DecodingMachine& machine() const { return machine_; }
  int feature_dim() const { return feature_dim_; }
  int vocab_size() const { return vocab_.size(); }

  PolicyParams zero_params() const { return PolicyParams(vocab_size(), feature_dim_); }
  // Zero matrix plus N(0, scale^2) noise from the init substream.
  PolicyParams init_params(double scale, std::uint64_t seed) const;

  DecodeContext initial_context(int question_key) const;

  std::array<int, 3> active_features(const DecodeContext& ctx) const;
  std::vector<double> features(const DecodeContext& ctx) const;

  // Probability vector over the full vocabulary; illegal tokens are exactly
  // 0. Throws Error(kAllMasked) if nothing is legal.
  std::vector<double> next_token_dist(const PolicyParams& params,
                                      const DecodeContext& ctx) const;

  SampledToken sample_token(const PolicyParams& params, const DecodeContext& ctx,
                            Rng& rng) const;

  double log_prob(const PolicyParams& params, const DecodeContext& ctx,
                  TokenId token) const;

  // d log pi(token | ctx) / dW, dense and shaped like W. Throws
  // Error(kIllegalToken) if the token is masked in ctx.
  PolicyParams grad_log_prob(const PolicyParams& params, const DecodeContext& ctx,
                             TokenId token) const;

  // grad += scale * d log pi(token | ctx) / dW, touching only the three
  // active feature columns. `dist` must be next_token_dist(params, ctx).
  void accumulate_grad_log_prob(const DecodeContext& ctx, TokenId token,
                                std::span<const double> dist, double scale,
                                PolicyParams& grad) const;

  // Context after the agent emits `token`.
  DecodeContext after_token(const DecodeContext& ctx, TokenId token) const;
  // Context after the executor returns `observation` from `tool`.
  DecodeContext after_observation(const DecodeContext& ctx, TokenId observation,
                                  int tool) const;

  // Reconstructs the decoding context of every token of a rollout by
  // replaying the state machine. Observation tokens get the context they
  // were inserted in. Throws Error(kIllegalToken) if an agent token was not
  // legal, Error(kMalformedTrajectory) if the rollout has no question key.
  std::vector<DecodeContext> replay_contexts(const Rollout& rollout) const;

 private:
  int observation_slot(const DecodeContext& ctx) const;

  Vocabulary vocab_;
  DecodingMachine machine_;
  int feature_dim_;
};

}  // namespace tepo

#endif  // TEPO_POLICY_HPP_
