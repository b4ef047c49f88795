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

#ifndef TEPO_CHECKPOINT_HPP_
#define TEPO_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>

#include "tepo/policy.hpp"

namespace tepo {

// Binary parameter checkpoint, little-endian:
//   char[8]  magic "TEPOCKPT"
//   u32      format version (1)
//   u32      vocabulary size
//   u32      key count
//   u32      tool count
//   u32      rows, u32 cols
//   f64      rows * cols weights, row-major
struct CheckpointHeader {
  std::uint32_t version = 1;
  std::uint32_t vocab_size = 0;
  std::uint32_t num_keys = 0;
  std::uint32_t num_tools = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Policy& policy,
                     const PolicyParams& params);

// Throws Error(kIo) if unreadable, Error(kShapeMismatch) if the header does
// not match the policy architecture.
PolicyParams load_checkpoint(const std::filesystem::path& path, const Policy& policy);

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

}  // namespace tepo

#endif  // TEPO_CHECKPOINT_HPP_
