// Copyright 2026 The Authors.
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

#ifndef LOGTMPL_ERROR_HPP_
#define LOGTMPL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace logtmpl {

enum class ErrorCode {
  kUnknownType,
  kEmptyTemplate,
  kEmptyLog,
  kEmptyWord,
  kProviderUnavailable,
  kDimensionMismatch,
  kZeroVector,
  kInvalidDelta,
  kInvalidWordCounts,
  kNoProbabilities,
  kGatewayError,
  kParseError,
  kFormatError,
  kMissingColumn,
  kNoGroundTruth,
  kAnnotatorUnavailable,
  kUnknownId,
  kInvalidConfig,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// contract violation so callers (CLI, HTTP service) can map it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace logtmpl

#endif  // LOGTMPL_ERROR_HPP_
