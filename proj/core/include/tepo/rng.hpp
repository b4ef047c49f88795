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

#ifndef TEPO_RNG_HPP_
#define TEPO_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tepo {

// Named random substreams. All randomness in a run flows from one master
// seed; each consumer derives its own engine from (master, stream, ids) so
// results do not depend on evaluation order or worker count.
enum class Stream : std::uint64_t {
  kQuestion = 1,
  kRollout = 2,
  kTool = 3,
  kInit = 4,
  kEval = 5,
  kWarmup = 6,
};

std::uint64_t SplitMix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng Derive(std::uint64_t master, Stream stream,
                    std::initializer_list<std::uint64_t> ids = {});

  // Uniform in [0, 1) with 53 random bits; portable across standard
  // libraries, unlike std::uniform_real_distribution.
  double Uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  // Standard normal via Box-Muller on Uniform().
  double Normal();

  std::uint64_t operator()() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tepo

#endif  // TEPO_RNG_HPP_
