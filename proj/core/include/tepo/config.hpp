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

#ifndef TEPO_CONFIG_HPP_
#define TEPO_CONFIG_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tepo/trainer.hpp"

namespace tepo {

// Flat "section.key" -> raw value map read from an INI-style file:
//
//   [training]
//   mode = tepo_sparse   # trailing comments start with '#' or ';'
//
// Keys outside a section are rejected.
using ConfigMap = std::map<std::string, std::string>;

// Throws ParseError naming the line for malformed input.
ConfigMap parse_config_text(std::string_view text);
// Throws Error(kIo) if the file cannot be read.
ConfigMap load_config_file(const std::filesystem::path& path);

// Every recognised "section.key", in snapshot order.
const std::vector<std::string>& known_config_keys();

// Environment variable consulted for a key: TEPO_<SECTION>_<KEY>, upper-cased,
// e.g. TEPO_TRAINING_LEARNING_RATE for training.learning_rate.
std::string env_var_for_key(std::string_view key);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env_lookup();

// Overlays TEPO_* environment values onto `map` for every known key.
void apply_env_overrides(ConfigMap& map, const EnvLookup& lookup);

// Builds a config from defaults overlaid with `map`. Unknown keys and
// unparsable values raise Error(kInvalidConfig) naming the key. The result
// is validated.
TrainConfig config_from_map(const ConfigMap& map);

// Canonical text form of every key; config_from_map(parse_config_text(s))
// reproduces the config exactly.
std::string config_to_text(const TrainConfig& config);

std::string format_tools(const std::vector<ToolSpec>& tools);
// "name:quality[:cost],..."; throws Error(kInvalidConfig).
std::vector<ToolSpec> parse_tools(std::string_view text);

}  // namespace tepo

#endif  // TEPO_CONFIG_HPP_
