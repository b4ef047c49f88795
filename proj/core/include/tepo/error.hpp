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

#ifndef TEPO_ERROR_HPP_
#define TEPO_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tepo {

enum class ErrorCode {
  kMalformedTrajectory,
  kInvalidDistribution,
  kUndefinedDelta,
  kInvalidCounts,
  kEmptyGroup,
  kSizeMismatch,
  kMissingEntropyAnnotation,
  kNonFinite,
  kSupportMismatch,
  kShapeMismatch,
  kAllMasked,
  kIllegalToken,
  kInvalidQuery,
  kInvalidConfig,
  kParseError,
  kSchemaVersionMismatch,
  kNoScoredCalls,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures inside a line-oriented file carry the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tepo

#endif  // TEPO_ERROR_HPP_
