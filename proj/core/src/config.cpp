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

#include "tepo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "tepo/error.hpp"

namespace tepo {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value,
                           std::string_view expected) {
  throw Error(ErrorCode::kInvalidConfig,
              fmt::format("{}: cannot parse '{}' as {}", key, value, expected));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text, std::string_view expected) {
  T out{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || text.empty()) BadValue(key, text, expected);
  return out;
}

int ParseInt(std::string_view key, std::string_view v) {
  return ParseNumber<int>(key, v, "an integer");
}

double ParseDouble(std::string_view key, std::string_view v) {
  return ParseNumber<double>(key, v, "a number");
}

bool ParseBool(std::string_view key, std::string_view v) {
  std::string lower(v);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  BadValue(key, v, "a boolean");
}

std::string Num(double x) { return fmt::format("{}", x); }

struct Field {
  std::string key;
  std::function<void(TrainConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define TEPO_INT_FIELD(name, member)                                               \
  Field {                                                                          \
    name, [](TrainConfig& c, std::string_view k, std::string_view v) {             \
      c.member = ParseInt(k, v);                                                   \
    },                                                                             \
        [](const TrainConfig& c) { return std::to_string(c.member); }              \
  }
#define TEPO_DOUBLE_FIELD(name, member)                                            \
  Field {                                                                          \
    name, [](TrainConfig& c, std::string_view k, std::string_view v) {             \
      c.member = ParseDouble(k, v);                                                \
    },                                                                             \
        [](const TrainConfig& c) { return Num(c.member); }                         \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      TEPO_INT_FIELD("environment.num_keys", environment.num_keys),
      TEPO_INT_FIELD("environment.num_values", environment.num_values),
      Field{"environment.tools",
            [](TrainConfig& c, std::string_view, std::string_view v) {
              c.environment.tools = parse_tools(v);
            },
            [](const TrainConfig& c) { return format_tools(c.environment.tools); }},
      TEPO_INT_FIELD("environment.max_steps", environment.max_steps),
      TEPO_INT_FIELD("environment.max_tool_calls", environment.max_tool_calls),
      TEPO_INT_FIELD("policy.reasoning_tokens", policy.reasoning_tokens),
      TEPO_DOUBLE_FIELD("policy.init_scale", policy.init_scale),
      Field{"training.mode",
            [](TrainConfig& c, std::string_view k, std::string_view v) {
              auto mode = ParseMode(v);
              if (!mode) {
                throw Error(ErrorCode::kInvalidConfig,
                            fmt::format("{}: unknown mode '{}' (valid modes: grpo, "
                                        "sparse, dense, tepo_sparse, tepo_dense)",
                                        k, v));
              }
              c.mode = *mode;
            },
            [](const TrainConfig& c) { return std::string(ModeName(c.mode)); }},
      TEPO_INT_FIELD("training.rollouts_per_question", rollouts_per_question),
      TEPO_INT_FIELD("training.questions_per_step", questions_per_step),
      TEPO_DOUBLE_FIELD("training.learning_rate", learning_rate),
      TEPO_INT_FIELD("training.total_steps", total_steps),
      TEPO_INT_FIELD("training.warmup_steps", warmup_steps),
      TEPO_DOUBLE_FIELD("training.warmup_learning_rate", warmup_learning_rate),
      TEPO_DOUBLE_FIELD("training.alpha", reward.alpha),
      TEPO_DOUBLE_FIELD("training.epsilon", reward.epsilon),
      TEPO_DOUBLE_FIELD("training.beta", objective.beta),
      Field{"training.clip_epsilon",
            [](TrainConfig& c, std::string_view k, std::string_view v) {
              if (v == "none") {
                c.objective.clip_epsilon.reset();
              } else {
                c.objective.clip_epsilon = ParseDouble(k, v);
              }
            },
            [](const TrainConfig& c) {
              return c.objective.clip_epsilon ? Num(*c.objective.clip_epsilon)
                                              : std::string("none");
            }},
      TEPO_INT_FIELD("training.minibatch_epochs", objective.minibatch_epochs),
      Field{"training.seed",
            [](TrainConfig& c, std::string_view k, std::string_view v) {
              c.seed = ParseNumber<std::uint64_t>(k, v, "an unsigned 64-bit integer");
            },
            [](const TrainConfig& c) { return std::to_string(c.seed); }},
      TEPO_INT_FIELD("training.num_workers", num_workers),
      Field{"logging.trajectories",
            [](TrainConfig& c, std::string_view k, std::string_view v) {
              c.logging.trajectories = ParseBool(k, v);
            },
            [](const TrainConfig& c) {
              return std::string(c.logging.trajectories ? "true" : "false");
            }},
      TEPO_INT_FIELD("logging.trajectory_every", logging.trajectory_every),
  };
  return fields;
}

#undef TEPO_INT_FIELD
#undef TEPO_DOUBLE_FIELD

}  // namespace

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) {
      line = line.substr(0, c);
    }
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ParseError(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = Trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (section.empty()) {
      throw ParseError(line_no, fmt::format("key '{}' outside of a section", key));
    }
    out[section + "." + std::string(key)] = std::string(Trim(line.substr(eq + 1)));
  }
  return out;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : Fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

std::string env_var_for_key(std::string_view key) {
  std::string out = "TEPO_";
  for (char c : key) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

EnvLookup process_env_lookup() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

void apply_env_overrides(ConfigMap& map, const EnvLookup& lookup) {
  for (const auto& key : known_config_keys()) {
    if (auto v = lookup(env_var_for_key(key))) map[key] = std::string(Trim(*v));
  }
}

TrainConfig config_from_map(const ConfigMap& map) {
  TrainConfig config;
  for (const auto& [key, value] : map) {
    const auto& fields = Fields();
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const Field& f) { return f.key == key; });
    if (it == fields.end()) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("unknown config key '{}'", key));
    }
    it->set(config, key, value);
  }
  validate(config);
  return config;
}

std::string config_to_text(const TrainConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : Fields()) {
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += '\n';
      out += "[" + s + "]\n";
      section = s;
    }
    out += f.key.substr(dot + 1) + " = " + f.get(config) + "\n";
  }
  return out;
}

std::string format_tools(const std::vector<ToolSpec>& tools) {
  std::string out;
  for (const auto& t : tools) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}:{}:{}", t.name, Num(t.quality), Num(t.cost));
  }
  return out;
}

std::vector<ToolSpec> parse_tools(std::string_view text) {
  constexpr std::string_view kKey = "environment.tools";
  std::vector<ToolSpec> tools;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = Trim(text.substr(
        pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    const auto c1 = item.find(':');
    if (c1 == std::string_view::npos || c1 == 0) {
      BadValue(kKey, item, "name:quality[:cost]");
    }
    ToolSpec spec;
    spec.name = std::string(Trim(item.substr(0, c1)));
    auto rest = item.substr(c1 + 1);
    const auto c2 = rest.find(':');
    spec.quality = ParseDouble(kKey, Trim(rest.substr(0, c2)));
    if (c2 != std::string_view::npos) spec.cost = ParseDouble(kKey, Trim(rest.substr(c2 + 1)));
    tools.push_back(std::move(spec));
  }
  return tools;
}

}  // namespace tepo
