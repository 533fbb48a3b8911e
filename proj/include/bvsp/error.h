// Copyright 2026 The bvsp Authors.
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

#ifndef BVSP_ERROR_H_
#define BVSP_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bvsp {

enum class ErrorCode {
  kInvalidArgument,
  kUnknownPolaritySurface,
  kMarkerCollision,
  kUnknownTemplate,
  kScorerUnavailable,
  kProtocolViolation,
  kSpanMismatch,
  kInvalidK,
  kInvalidTau,
  kDuplicateId,
  kUnknownId,
  kEmptyPool,
  kParseError,
  kEmptyFile,
  kInvalidBuckets,
  kIoError,
};

const char *ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception. The code is the
// stable, testable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Input file syntax error. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string &message, std::size_t line, std::size_t column)
      : Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace bvsp

#endif  // BVSP_ERROR_H_
