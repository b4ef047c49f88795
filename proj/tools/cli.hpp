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

#ifndef TEPO_TOOLS_CLI_HPP_
#define TEPO_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "tepo/config.hpp"

namespace tepo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;

// Entry point shared by the binary and the tests. `args` excludes the
// program name. Nothing is written outside `out`, `err` and the paths named
// on the command line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env_lookup());

}  // namespace tepo::cli

#endif  // TEPO_TOOLS_CLI_HPP_
