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

#ifndef TEPO_ANALYZER_HPP_
#define TEPO_ANALYZER_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tepo/trajectory.hpp"

namespace tepo {

// Parses a trajectory JSONL file. Entropy annotations missing from the file
// are recomputed from token entropies; judge scores are kept as stored.
std::vector<Rollout> load_trajectories(const std::filesystem::path& path);

struct PilotRow {
  int score = 0;
  // Every scored call with this score, degenerate ones included.
  long count = 0;
  // Means skip degenerate calls.
  std::optional<double> mean_delta_h;
  // Over the calls of this group whose ratio is defined (delta < 0).
  std::optional<double> mean_delta_ratio;
  long degenerate = 0;

  friend bool operator==(const PilotRow&, const PilotRow&) = default;
};

struct PilotReport {
  std::string source;
  // Empty, or exactly the score-0 row followed by the score-1 row.
  std::vector<PilotRow> rows;
  long unscored = 0;

  friend bool operator==(const PilotReport&, const PilotReport&) = default;
};

// Groups every scored tool call by its judge score and averages the stored
// delta and ratio per group. Throws Error(kNoScoredCalls) if no call in the
// corpus has a score.
PilotReport pilot_statistics(std::span<const Rollout> rollouts, std::string source = {});

enum class ReportFormat { kCsv, kTable };

struct ReportOptions {
  ReportFormat format = ReportFormat::kCsv;
  // Multiplies displayed statistics by 1e3 in the text table. CSV output is
  // always unscaled.
  bool scale_1e3 = false;
};

std::string render_report(const PilotReport& report, const ReportOptions& options = {});
void export_report(const PilotReport& report, const std::filesystem::path& path,
                   const ReportOptions& options = {});
// Inverse of the CSV rendering; throws ParseError naming the line.
PilotReport parse_report_csv(std::string_view text);

// Largest absolute difference between stored and freshly recomputed call
// annotations (delta and ratio) over a corpus; 0 for an exact match.
struct RecomputeCheck {
  long calls = 0;
  double max_abs_delta_error = 0.0;
  double max_abs_ratio_error = 0.0;
  // Calls whose definedness of the ratio or degenerate flag differ.
  long structural_mismatches = 0;
};

RecomputeCheck recompute_and_compare(std::span<const Rollout> rollouts);

}  // namespace tepo

#endif  // TEPO_ANALYZER_HPP_
