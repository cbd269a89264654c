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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zsc {

enum class ErrorCode {
  kZeroVector,
  kDimensionMismatch,
  kEmptyInput,
  kNonFinite,
  kKOutOfRange,
  kWeightOutOfRange,
  kInvalidArgument,
  kDuplicateLabel,
  kEmptyFile,
  kEmptyLabel,
  kMissingEmbedding,
  kNotUnitNorm,
  kEmbeddingsNotAttached,
  kIoError,
  kDuplicateId,
  kMalformedLine,
  kBadMagic,
  kUnsupportedVersion,
  kCountMismatch,
  kInvariantViolation,
  kMissingVerdict,
  kNoEligibleRow,
  kEmptyPartition,
  kEmptyClass,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as zsc::Error. `subject` names the offending
// id, label or path when there is one; `line` is 1-based, 0 when not
// applicable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string subject = {},
        std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::size_t line_;
};

}  // namespace zsc
