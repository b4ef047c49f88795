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

#ifndef TEPO_TRAJECTORY_IO_HPP_
#define TEPO_TRAJECTORY_IO_HPP_

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tepo/trajectory.hpp"

namespace tepo {

inline constexpr int kTrajectorySchemaVersion = 1;

// One rollout as a single JSONL line (no trailing newline).
std::string serialize_rollout(const Rollout& rollout);

// Parses one JSONL line. Segments and tool records are rebuilt from the
// token stream; stored per-call entropy fields are kept when present and
// recomputed from token entropies otherwise. Throws ParseError naming
// `line_number` for malformed JSON, schema violations, or trajectories that
// fail segmentation, and Error(kSchemaVersionMismatch) for a foreign schema.
Rollout parse_rollout(std::string_view line, std::size_t line_number = 1);

std::vector<Rollout> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, std::span<const Rollout> rollouts);

// Appends rollouts as they are produced.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const Rollout& rollout);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace tepo

#endif  // TEPO_TRAJECTORY_IO_HPP_
