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

#include "tepo/vocabulary.hpp"

#include <algorithm>

#include "tepo/error.hpp"

namespace tepo {

TokenMarker MarkerFromText(std::string_view text, bool is_observation) {
  if (is_observation) return TokenMarker::kObservation;
  if (text.starts_with("TOOL_OPEN")) return TokenMarker::kToolOpen;
  if (text == "TOOL_CLOSE") return TokenMarker::kToolClose;
  if (text == "ANS_OPEN") return TokenMarker::kAnswerOpen;
  if (text == "ANS_CLOSE") return TokenMarker::kAnswerClose;
  if (text == "FIN") return TokenMarker::kFinish;
  return TokenMarker::kContent;
}

Vocabulary::Vocabulary(int num_values, int num_keys,
                       std::vector<std::string> tool_names)
    : num_values_(num_values),
      num_keys_(num_keys),
      tool_names_(std::move(tool_names)) {
  if (num_values_ < 2) {
    throw Error(ErrorCode::kInvalidConfig, "num_values must be >= 2");
  }
  if (num_keys_ < 1 || num_keys_ > kMaxKeys) {
    throw Error(ErrorCode::kInvalidConfig, "num_keys must be in [1, 26]");
  }
  if (tool_names_.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one tool is required");
  }
  for (int v = 0; v < num_values_; ++v) symbols_.push_back("v_" + std::to_string(v));
  for (int k = 0; k < num_keys_; ++k) {
    symbols_.push_back(std::string("key_") + static_cast<char>('a' + k));
  }
  if (tool_names_.size() == 1) {
    symbols_.push_back("TOOL_OPEN");
  } else {
    for (const auto& name : tool_names_) symbols_.push_back("TOOL_OPEN:" + name);
  }
  for (const char* s :
       {"TOOL_CLOSE", "ANS_OPEN", "ANS_CLOSE", "FIN", "THINK", "PAD"}) {
    symbols_.emplace_back(s);
  }
  auto sorted = symbols_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kInvalidConfig, "tool names must be distinct");
  }
}

const std::string& Vocabulary::text(TokenId id) const {
  if (id < 0 || id >= size()) {
    throw Error(ErrorCode::kIllegalToken,
                "token id " + std::to_string(id) + " outside vocabulary");
  }
  return symbols_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view text) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), text);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<TokenId>(it - symbols_.begin());
}

std::optional<int> Vocabulary::tool_of(TokenId id) const {
  const int first = num_values_ + num_keys_;
  if (id >= first && id < first + num_tools()) return id - first;
  return std::nullopt;
}

TokenMarker Vocabulary::marker(TokenId id) const {
  return MarkerFromText(text(id), false);
}

}  // namespace tepo
