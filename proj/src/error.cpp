// Copyright 2026 The ZSC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zsc/error.hpp"

namespace zsc {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kKOutOfRange: return "KOutOfRange";
    case ErrorCode::kWeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateLabel: return "DuplicateLabel";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kEmptyLabel: return "EmptyLabel";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kNotUnitNorm: return "NotUnitNorm";
    case ErrorCode::kEmbeddingsNotAttached: return "EmbeddingsNotAttached";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kMissingVerdict: return "MissingVerdict";
    case ErrorCode::kNoEligibleRow: return "NoEligibleRow";
    case ErrorCode::kEmptyPartition: return "EmptyPartition";
    case ErrorCode::kEmptyClass: return "EmptyClass";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string subject,
             std::size_t line)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      subject_(std::move(subject)),
      line_(line) {}

}  // namespace zsc
