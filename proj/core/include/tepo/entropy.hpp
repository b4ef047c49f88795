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

#ifndef TEPO_ENTROPY_HPP_
#define TEPO_ENTROPY_HPP_

#include <optional>
#include <span>

#include "tepo/trajectory.hpp"

namespace tepo {

struct EntropyConstants {
  // Guards the delta ratio denominator.
  double epsilon = 1e-8;
};

// Shannon entropy in nats, with 0 ln 0 = 0. Throws
// Error(kInvalidDistribution) for negative entries or a sum more than 1e-9
// away from 1.
double token_entropy(std::span<const double> dist);

// Mean token entropy over a reasoning segment; nullopt for an empty one.
std::optional<double> segment_entropy(const Rollout& rollout,
                                      const Segment& segment);

// h_post - h_pre. Throws Error(kUndefinedDelta) if either side is absent.
double delta_segment_entropy(std::optional<double> h_pre,
                             std::optional<double> h_post);

// (h_post - h_pre) / (h_pre + epsilon), defined only for a strict decrease.
std::optional<double> delta_ratio(double h_pre, double h_post,
                                  double epsilon = EntropyConstants{}.epsilon);

// 1 iff the delta is defined and strictly negative.
int entropy_decrease_indicator(std::optional<double> delta);

// Fills h_pre, h_post, delta, ratio, indicator and the degenerate flag of
// every call: call k compares r_{k-1} against r_k. A call with an empty
// neighbouring segment is degenerate: delta 0, no ratio, indicator 0.
Rollout annotate_rollout_entropies(Rollout rollout,
                                   const EntropyConstants& constants = {});

}  // namespace tepo

#endif  // TEPO_ENTROPY_HPP_
