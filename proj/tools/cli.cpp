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

#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "tepo/analyzer.hpp"
#include "tepo/checkpoint.hpp"
#include "tepo/error.hpp"
#include "tepo/trainer.hpp"

#ifndef TEPO_VERSION
#define TEPO_VERSION "0.0.0"
#endif

namespace tepo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kMetricsName = "metrics.csv";
constexpr const char* kCheckpointName = "checkpoint.bin";
constexpr const char* kTrajectoriesName = "trajectories.jsonl";
constexpr const char* kEvalName = "eval.csv";

// A failure already reported to the user, carrying the exit code.
struct Exit {
  int code;
};

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kNonFinite:
      return kExitFailure;
    default:
      return kExitInvalid;
  }
}

std::string Timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::string KeysHelp() {
  std::string out =
      "Config keys (INI sections; environment variable overrides in brackets):\n";
  for (const auto& key : known_config_keys()) {
    out += fmt::format("  {:<34} [{}]\n", key, env_var_for_key(key));
  }
  out +=
      "Precedence: command-line flags > environment > config file > built-in default.\n";
  return out;
}

// Command-line options that feed the config map.
struct ConfigFlags {
  std::string config_path;
  std::string manifest_path;
  std::vector<std::string> sets;
};

void AddConfigFlags(CLI::App& cmd, ConfigFlags& flags) {
  cmd.add_option("--config", flags.config_path, "INI config file");
  auto* from = cmd.add_option("--from-manifest", flags.manifest_path,
                              "Use the config snapshot of an earlier run's manifest.json");
  from->excludes(cmd.get_option("--config"));
  cmd.add_option("--set", flags.sets, "Override one key, e.g. --set training.beta=0.1")
      ->take_all();
}

ConfigMap ManifestConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  const auto it = j.find("config");
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": manifest has no config object");
  }
  ConfigMap map;
  for (const auto& [key, value] : it->items()) {
    if (!value.is_string()) {
      throw Error(ErrorCode::kInvalidConfig,
                  fmt::format("{}: manifest config value for '{}' is not a string",
                              path.string(), key));
    }
    map[key] = value.get<std::string>();
  }
  return map;
}

ConfigMap ResolveMap(const ConfigFlags& flags, const EnvLookup& env) {
  ConfigMap map;
  if (!flags.manifest_path.empty()) {
    map = ManifestConfig(flags.manifest_path);
  } else if (!flags.config_path.empty()) {
    map = load_config_file(flags.config_path);
  }
  apply_env_overrides(map, env);
  for (const auto& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kInvalidConfig,
                  fmt::format("--set expects key=value, got '{}'", s));
    }
    map[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return map;
}

void SetMode(ConfigMap& map, const std::string& mode, std::ostream& err) {
  if (mode.empty()) return;
  if (!ParseMode(mode)) {
    err << fmt::format(
        "error: unknown mode '{}'; valid modes: grpo, sparse, dense "
        "(also tepo_sparse, tepo_dense)\n",
        mode);
    throw Exit{kExitInvalid};
  }
  map["training.mode"] = mode;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + dir.string());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

json SnapshotJson(const TrainConfig& config) {
  json j = json::object();
  for (const auto& [key, value] : parse_config_text(config_to_text(config))) j[key] = value;
  return j;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  ConfigFlags config;
  std::string mode;
  std::string out_dir;
  std::string seed;
  std::string steps;
  bool verbose = false;
};

int CmdTrain(const TrainArgs& a, std::ostream& out, std::ostream& err,
             const EnvLookup& env) {
  ConfigMap map = ResolveMap(a.config, env);
  SetMode(map, a.mode, err);
  if (!a.seed.empty()) map["training.seed"] = a.seed;
  if (!a.steps.empty()) map["training.total_steps"] = a.steps;
  const TrainConfig config = config_from_map(map);

  const fs::path dir = a.out_dir;
  EnsureDirectory(dir);
  json manifest;
  manifest["tool"] = "tepo";
  manifest["version"] = TEPO_VERSION;
  manifest["command"] = "train";
  manifest["config"] = SnapshotJson(config);
  manifest["seed"] = config.seed;
  manifest["artifacts"] = {
      {"metrics", kMetricsName},
      {"checkpoint", kCheckpointName},
      {"trajectories", config.logging.trajectories ? json(kTrajectoriesName) : json(nullptr)},
  };
  manifest["started_at"] = Timestamp();
  manifest["finished_at"] = nullptr;
  manifest["status"] = "running";
  WriteText(dir / kManifestName, manifest.dump(2) + "\n");

  TrainOutputs outputs;
  outputs.metrics_csv = dir / kMetricsName;
  if (config.logging.trajectories) outputs.trajectories_jsonl = dir / kTrajectoriesName;
  if (a.verbose) {
    outputs.on_step = [&](const StepMetrics& m) {
      err << fmt::format("step {:>4}  f1 {:.4f}  n {:.3f}  m/n {:.3f}  good {:.3f}\n",
                         m.step, m.mean_f1, m.mean_n, m.ratio_m_over_n,
                         m.good_tool_fraction);
    };
  }
  const TrainResult result = train(config, outputs);
  save_checkpoint(dir / kCheckpointName, make_policy(config), result.params);

  manifest["finished_at"] = Timestamp();
  manifest["status"] = "completed";
  WriteText(dir / kManifestName, manifest.dump(2) + "\n");

  out << fmt::format("trained {} for {} steps (seed {}) -> {}\n", ModeName(config.mode),
                     config.total_steps, config.seed, dir.string());
  if (!result.metrics.empty()) {
    const StepMetrics& m = result.metrics.back();
    out << fmt::format("final step: f1 {:.4f}  n {:.3f}  m/n {:.3f}  good {:.3f}\n",
                       m.mean_f1, m.mean_n, m.ratio_m_over_n, m.good_tool_fraction);
  }
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  ConfigFlags config;
  std::string checkpoint;
  std::string out_dir;
  int episodes = 256;
  int repeats = 5;
  std::optional<std::uint64_t> seed;
};

std::string EvalCsv(const EvalReport& report) {
  std::string csv = "row,mean_f1,mean_n,m_over_n,good_tool_fraction,mean_delta_h\n";
  auto row = [&](const std::string& label, const EvalMetrics& m) {
    csv += fmt::format("{},{},{},{},{},{}\n", label, m.mean_f1, m.mean_n, m.ratio_m_over_n,
                       m.good_tool_fraction, m.mean_delta_h);
  };
  for (std::size_t i = 0; i < report.repeats.size(); ++i) {
    row(std::to_string(i), report.repeats[i]);
  }
  row("mean", report.mean);
  row("std", report.stddev);
  return csv;
}

int CmdEval(const EvalArgs& a, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  const TrainConfig config = config_from_map(ResolveMap(a.config, env));
  if (!fs::is_regular_file(a.checkpoint)) {
    err << fmt::format("error: checkpoint not found: {}\n", a.checkpoint);
    return kExitInvalid;
  }
  const Policy policy = make_policy(config);
  const PolicyParams params = load_checkpoint(a.checkpoint, policy);

  EvalConfig eval;
  eval.episodes = a.episodes;
  eval.repeats = a.repeats;
  eval.seed = a.seed.value_or(config.seed);
  const EvalReport report = evaluate(policy, params, config.environment, eval);

  EnsureDirectory(a.out_dir);
  WriteText(fs::path(a.out_dir) / kEvalName, EvalCsv(report));
  out << fmt::format("evaluated {} x {} episodes (seed {})\n", eval.repeats, eval.episodes,
                     eval.seed);
  out << fmt::format("  f1    {:.4f} +- {:.4f}\n", report.mean.mean_f1, report.stddev.mean_f1);
  out << fmt::format("  n     {:.4f} +- {:.4f}\n", report.mean.mean_n, report.stddev.mean_n);
  out << fmt::format("  m/n   {:.4f} +- {:.4f}\n", report.mean.ratio_m_over_n,
                     report.stddev.ratio_m_over_n);
  out << fmt::format("  good  {:.4f} +- {:.4f}\n", report.mean.good_tool_fraction,
                     report.stddev.good_tool_fraction);
  return kExitOk;
}

// -------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string input;
  std::string out_path;
  std::string format = "csv";
  std::string source;
  bool scale = false;
  bool verify = false;
};

int CmdAnalyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const auto rollouts = load_trajectories(a.input);
  const PilotReport report =
      pilot_statistics(rollouts, a.source.empty() ? fs::path(a.input).filename().string()
                                                  : a.source);
  ReportOptions file_opts;
  file_opts.format = a.format == "table" ? ReportFormat::kTable : ReportFormat::kCsv;
  file_opts.scale_1e3 = a.scale;
  export_report(report, a.out_path, file_opts);
  out << render_report(report, ReportOptions{ReportFormat::kTable, a.scale});
  if (a.verify) {
    const RecomputeCheck check = recompute_and_compare(rollouts);
    out << fmt::format(
        "recomputed {} calls: max |delta error| {:.3g}, max |ratio error| {:.3g}, "
        "{} structural mismatches\n",
        check.calls, check.max_abs_delta_error, check.max_abs_ratio_error,
        check.structural_mismatches);
    if (check.structural_mismatches > 0 || check.max_abs_delta_error > 1e-10 ||
        check.max_abs_ratio_error > 1e-10) {
      err << "error: stored entropy annotations disagree with the token entropies\n";
      return kExitInvalid;
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------- config

struct ConfigArgs {
  ConfigFlags config;
  bool keys = false;
};

int CmdConfig(const ConfigArgs& a, std::ostream& out, const EnvLookup& env) {
  if (a.keys) {
    out << KeysHelp();
    return kExitOk;
  }
  out << config_to_text(config_from_map(ResolveMap(a.config, env)));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
  CLI::App app{"tepo: entropy-guided policy optimization lab for tool-using agents", "tepo"};
  app.set_version_flag("--version", TEPO_VERSION);
  app.require_subcommand(1);
  app.footer(KeysHelp());

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a policy and write run artifacts");
  AddConfigFlags(*train, train_args.config);
  train->add_option("--mode", train_args.mode, "grpo | sparse | dense");
  train->add_option("--out", train_args.out_dir, "Output directory")->required();
  train->add_option("--seed", train_args.seed, "Master seed (u64), overrides training.seed");
  train->add_option("--steps", train_args.steps, "Overrides training.total_steps");
  train->add_flag("--verbose,-v", train_args.verbose, "Print per-step metrics to stderr");
  train->footer(
      "Writes manifest.json (before training starts), metrics.csv, checkpoint.bin and,\n"
      "when logging.trajectories is set, trajectories.jsonl into --out.");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint without updates");
  AddConfigFlags(*eval, eval_args.config);
  eval->add_option("--checkpoint", eval_args.checkpoint, "checkpoint.bin")->required();
  eval->add_option("--episodes", eval_args.episodes, "Episodes per repeat")
      ->check(CLI::PositiveNumber);
  eval->add_option("--repeats", eval_args.repeats, "Independent seeded repeats")
      ->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_args.seed, "Evaluation seed (default training.seed)");
  eval->add_option("--out", eval_args.out_dir, "Output directory for eval.csv")->required();

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Score-grouped entropy statistics");
  analyze->add_option("--input", analyze_args.input, "Trajectory JSONL")->required();
  analyze->add_option("--out", analyze_args.out_path, "Report path")->required();
  analyze->add_option("--format", analyze_args.format, "csv | table")
      ->check(CLI::IsMember({"csv", "table"}));
  analyze->add_option("--source", analyze_args.source, "Source label (default: file name)");
  analyze->add_flag("--scale-1e3", analyze_args.scale,
                    "Multiply displayed statistics by 1e3. Applies to the printed table "
                    "and --format table files; CSV files always hold unscaled values.");
  analyze->add_flag("--verify", analyze_args.verify,
                    "Recompute every delta from token entropies and compare");

  ConfigArgs config_args;
  auto* config = app.add_subcommand("config", "Print the resolved config");
  AddConfigFlags(*config, config_args.config);
  config->add_flag("--keys", config_args.keys, "List config keys and environment names");

  std::vector<const char*> argv{"tepo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*train) return CmdTrain(train_args, out, err, env);
    if (*eval) return CmdEval(eval_args, out, err, env);
    if (*analyze) return CmdAnalyze(analyze_args, out, err);
    if (*config) return CmdConfig(config_args, out, env);
  } catch (const Exit& e) {
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitInvalid;
}

}  // namespace tepo::cli
