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
#include <string>

#include "tepo/error.hpp"

namespace tepo {

double token_entropy(std::span<const double> dist) {
  if (dist.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "empty distribution");
  }
  double sum = 0.0;
  double h = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "negative or non-finite probability " + std::to_string(p));
    }
    sum += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidDistribution,
                "probabilities sum to " + std::to_string(sum));
  }
  return h < 0.0 ? 0.0 : h;
}

std::optional<double> segment_entropy(const Rollout& rollout,
                                      const Segment& segment) {
  if (segment.empty()) return std::nullopt;
  double sum = 0.0;
  for (int i = segment.start; i < segment.end; ++i) {
    sum += rollout.tokens[static_cast<std::size_t>(i)].entropy;
  }
  return sum / static_cast<double>(segment.size());
}

double delta_segment_entropy(std::optional<double> h_pre,
                             std::optional<double> h_post) {
  if (!h_pre || !h_post) {
    throw Error(ErrorCode::kUndefinedDelta, "segment entropy absent");
  }
  return *h_post - *h_pre;
}

std::optional<double> delta_ratio(double h_pre, double h_post, double epsilon) {
  const double delta = h_post - h_pre;
  if (!(delta < 0.0)) return std::nullopt;
  return delta / (h_pre + epsilon);
}

int entropy_decrease_indicator(std::optional<double> delta) {
  return (delta && *delta < 0.0) ? 1 : 0;
}

Rollout annotate_rollout_entropies(Rollout rollout,
                                   const EntropyConstants& constants) {
  for (auto& call : rollout.tool_calls) {
    const Segment* pre = rollout.reasoning_segment(call.k - 1);
    const Segment* post = rollout.reasoning_segment(call.k);
    call.h_pre = pre ? segment_entropy(rollout, *pre) : std::nullopt;
    call.h_post = post ? segment_entropy(rollout, *post) : std::nullopt;
    call.entropy_annotated = true;
    if (call.h_pre && call.h_post) {
      call.degenerate = false;
      call.delta = delta_segment_entropy(call.h_pre, call.h_post);
      call.ratio = delta_ratio(*call.h_pre, *call.h_post, constants.epsilon);
      call.indicator = entropy_decrease_indicator(call.delta);
    } else {
      call.degenerate = true;
      call.delta = 0.0;
      call.ratio = std::nullopt;
      call.indicator = 0;
    }
  }
  return rollout;
}

}  // namespace tepo
