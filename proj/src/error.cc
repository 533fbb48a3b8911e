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

#include "bvsp/error.h"

namespace bvsp {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownPolaritySurface: return "UnknownPolaritySurface";
    case ErrorCode::kMarkerCollision: return "MarkerCollision";
    case ErrorCode::kUnknownTemplate: return "UnknownTemplate";
    case ErrorCode::kScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    case ErrorCode::kSpanMismatch: return "SpanMismatch";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kInvalidTau: return "InvalidTau";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kInvalidBuckets: return "InvalidBuckets";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bvsp
