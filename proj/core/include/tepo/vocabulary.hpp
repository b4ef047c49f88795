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

#ifndef TEPO_VOCABULARY_HPP_
#define TEPO_VOCABULARY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tepo {

using TokenId = int;

// Structural role of a token for the segmenter. Observation is not a
// vocabulary property: it is attached to tokens inserted by the executor.
enum class TokenMarker {
  kContent,
  kToolOpen,
  kToolClose,
  kAnswerOpen,
  kAnswerClose,
  kFinish,
  kObservation,
};

// Classifies a token by its surface text. Shared by the generator and the
// JSONL reader so both go through the same segmenter.
TokenMarker MarkerFromText(std::string_view text, bool is_observation);

// Fixed symbol set of the simulator, laid out as
//   v_0..v_{V-1}, key_a.., tool openers.., TOOL_CLOSE, ANS_OPEN, ANS_CLOSE,
//   FIN, THINK, PAD.
// PAD doubles as the beginning-of-sequence "last token".
class Vocabulary {
 public:
  static constexpr int kMaxKeys = 26;

  Vocabulary(int num_values, int num_keys, std::vector<std::string> tool_names);

  int size() const { return static_cast<int>(symbols_.size()); }
  int num_values() const { return num_values_; }
  int num_keys() const { return num_keys_; }
  int num_tools() const { return static_cast<int>(tool_names_.size()); }

  const std::string& text(TokenId id) const;
  std::optional<TokenId> find(std::string_view text) const;
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<std::string>& tool_names() const { return tool_names_; }

  TokenId value(int index) const { return index; }
  TokenId key(int index) const { return num_values_ + index; }
  TokenId tool_open(int tool) const { return num_values_ + num_keys_ + tool; }
  TokenId tool_close() const { return structural_base() + 0; }
  TokenId answer_open() const { return structural_base() + 1; }
  TokenId answer_close() const { return structural_base() + 2; }
  TokenId finish() const { return structural_base() + 3; }
  TokenId think() const { return structural_base() + 4; }
  TokenId pad() const { return structural_base() + 5; }

  bool is_value(TokenId id) const { return id >= 0 && id < num_values_; }
  bool is_key(TokenId id) const {
    return id >= num_values_ && id < num_values_ + num_keys_;
  }
  std::optional<int> tool_of(TokenId id) const;
  int key_index(TokenId id) const { return id - num_values_; }

  TokenMarker marker(TokenId id) const;

 private:
  int structural_base() const { return num_values_ + num_keys_ + num_tools(); }

  int num_values_;
  int num_keys_;
  std::vector<std::string> tool_names_;
  std::vector<std::string> symbols_;
};

}  // namespace tepo

#endif  // TEPO_VOCABULARY_HPP_
