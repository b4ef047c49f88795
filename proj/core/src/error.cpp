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

#include "tepo/error.hpp"

namespace tepo {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedTrajectory: return "MalformedTrajectory";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kUndefinedDelta: return "UndefinedDelta";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kMissingEntropyAnnotation: return "MissingEntropyAnnotation";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kAllMasked: return "AllMasked";
    case ErrorCode::kIllegalToken: return "IllegalToken";
    case ErrorCode::kInvalidQuery: return "InvalidQuery";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kNoScoredCalls: return "NoScoredCalls";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCode::kParseError,
            "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace tepo
