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

#include "tepo/analyzer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "tepo/entropy.hpp"
#include "tepo/error.hpp"
#include "tepo/trajectory_io.hpp"

namespace tepo {

namespace {

constexpr std::string_view kCsvHeader = "score,count,mean_delta_h,mean_delta_ratio,degenerate";

std::string CsvNumber(const std::optional<double>& v) {
  return v ? fmt::format("{:.17g}", *v) : std::string();
}

std::string TableNumber(const std::optional<double>& v, double scale) {
  return v ? fmt::format("{:.4f}", *v * scale) : std::string("-");
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

template <typename T>
T ParseField(std::string_view text, std::size_t line, const char* name) {
  T out{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, fmt::format("bad {} '{}'", name, text));
  }
  return out;
}

}  // namespace

std::vector<Rollout> load_trajectories(const std::filesystem::path& path) {
  return read_jsonl(path);
}

PilotReport pilot_statistics(std::span<const Rollout> rollouts, std::string source) {
  struct Acc {
    long count = 0;
    long degenerate = 0;
    long delta_n = 0;
    double delta_sum = 0.0;
    long ratio_n = 0;
    double ratio_sum = 0.0;
  };
  Acc acc[2];
  PilotReport report;
  report.source = std::move(source);
  for (const auto& r : rollouts) {
    for (const auto& call : r.tool_calls) {
      if (!call.quality_score) {
        ++report.unscored;
        continue;
      }
      const int score = *call.quality_score;
      if (score != 0 && score != 1) {
        throw Error(ErrorCode::kMalformedTrajectory,
                    fmt::format("rollout {} call {} has score {}", r.rollout_id, call.k,
                                score));
      }
      Acc& a = acc[score];
      ++a.count;
      if (!call.entropy_annotated) {
        throw Error(ErrorCode::kMissingEntropyAnnotation,
                    fmt::format("rollout {} call {} is not annotated", r.rollout_id,
                                call.k));
      }
      if (call.degenerate) {
        ++a.degenerate;
        continue;
      }
      ++a.delta_n;
      a.delta_sum += call.delta;
      if (call.ratio) {
        ++a.ratio_n;
        a.ratio_sum += *call.ratio;
      }
    }
  }
  if (acc[0].count + acc[1].count == 0) {
    throw Error(ErrorCode::kNoScoredCalls, "no tool call in the corpus carries a score");
  }
  for (int score = 0; score < 2; ++score) {
    const Acc& a = acc[score];
    PilotRow row;
    row.score = score;
    row.count = a.count;
    row.degenerate = a.degenerate;
    if (a.delta_n > 0) row.mean_delta_h = a.delta_sum / static_cast<double>(a.delta_n);
    if (a.ratio_n > 0) row.mean_delta_ratio = a.ratio_sum / static_cast<double>(a.ratio_n);
    report.rows.push_back(row);
  }
  return report;
}

std::string render_report(const PilotReport& report, const ReportOptions& options) {
  std::string out;
  if (options.format == ReportFormat::kCsv) {
    out += kCsvHeader;
    out += '\n';
    for (const auto& row : report.rows) {
      out += fmt::format("{},{},{},{},{}\n", row.score, row.count,
                         CsvNumber(row.mean_delta_h), CsvNumber(row.mean_delta_ratio),
                         row.degenerate);
    }
    return out;
  }
  const double scale = options.scale_1e3 ? 1e3 : 1.0;
  if (!report.source.empty()) out += fmt::format("source: {}\n", report.source);
  if (options.scale_1e3) out += "values scaled by 1e3\n";
  out += fmt::format("{:>5}  {:>8}  {:>12}  {:>16}  {:>10}\n", "score", "count",
                     "mean_dH", "mean_dH_ratio", "degenerate");
  for (const auto& row : report.rows) {
    out += fmt::format("{:>5}  {:>8}  {:>12}  {:>16}  {:>10}\n", row.score, row.count,
                       TableNumber(row.mean_delta_h, scale),
                       TableNumber(row.mean_delta_ratio, scale), row.degenerate);
  }
  out += fmt::format("unscored calls: {}\n", report.unscored);
  return out;
}

void export_report(const PilotReport& report, const std::filesystem::path& path,
                   const ReportOptions& options) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << render_report(report, options);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

PilotReport parse_report_csv(std::string_view text) {
  PilotReport report;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError(line_no, "unexpected report header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = SplitCsv(line);
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 columns");
    PilotRow row;
    row.score = ParseField<int>(fields[0], line_no, "score");
    row.count = ParseField<long>(fields[1], line_no, "count");
    if (!fields[2].empty()) row.mean_delta_h = ParseField<double>(fields[2], line_no, "mean");
    if (!fields[3].empty()) {
      row.mean_delta_ratio = ParseField<double>(fields[3], line_no, "ratio mean");
    }
    row.degenerate = ParseField<long>(fields[4], line_no, "degenerate count");
    report.rows.push_back(row);
  }
  if (!header_seen) throw ParseError(1, "missing report header");
  return report;
}

RecomputeCheck recompute_and_compare(std::span<const Rollout> rollouts) {
  RecomputeCheck check;
  for (const auto& stored : rollouts) {
    Rollout fresh = stored;
    attach_tool_records(fresh);
    fresh = annotate_rollout_entropies(std::move(fresh));
    for (std::size_t i = 0; i < stored.tool_calls.size(); ++i) {
      const auto& a = stored.tool_calls[i];
      const auto& b = fresh.tool_calls[i];
      ++check.calls;
      check.max_abs_delta_error =
          std::max(check.max_abs_delta_error, std::abs(a.delta - b.delta));
      if (a.ratio.has_value() != b.ratio.has_value() || a.degenerate != b.degenerate ||
          a.indicator != b.indicator) {
        ++check.structural_mismatches;
      } else if (a.ratio) {
        check.max_abs_ratio_error =
            std::max(check.max_abs_ratio_error, std::abs(*a.ratio - *b.ratio));
      }
    }
  }
  return check;
}

}  // namespace tepo
