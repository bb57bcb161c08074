// Copyright 2026 The mbverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MBV_ERROR_H_
#define MBV_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbv {

enum class ErrorCode {
  kSyntaxError,
  kLoopDisallowed,
  kMissingRecv,
  kUnknownIdentifier,
  kInfiniteCodomain,
  kNonLocalState,
  kTypeError,
  kUnknownModel,
  kUnboundAddress,
  kDuplicateAddress,
  kMissingConfig,
  kInvalidTopology,
  kMultipathRejected,
  kPreconditionViolated,
  kMissingClassification,
  kNotSkolemizable,
  kSolverFailure,
  kParseError,
  kBoundTooLarge,
  kUnsupportedQuery,
  kIo,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kLoopDisallowed: return "LoopDisallowed";
    case ErrorCode::kMissingRecv: return "MissingRecv";
    case ErrorCode::kUnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::kInfiniteCodomain: return "InfiniteCodomain";
    case ErrorCode::kNonLocalState: return "NonLocalState";
    case ErrorCode::kTypeError: return "TypeError";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kUnboundAddress: return "UnboundAddress";
    case ErrorCode::kDuplicateAddress: return "DuplicateAddress";
    case ErrorCode::kMissingConfig: return "MissingConfig";
    case ErrorCode::kInvalidTopology: return "InvalidTopology";
    case ErrorCode::kMultipathRejected: return "MultipathRejected";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kMissingClassification: return "MissingClassification";
    case ErrorCode::kNotSkolemizable: return "NotSkolemizable";
    case ErrorCode::kSolverFailure: return "SolverFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kBoundTooLarge: return "BoundTooLarge";
    case ErrorCode::kUnsupportedQuery: return "UnsupportedQuery";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// Every failure surfaced by the library. Source positions are 1-based and
// zero when not applicable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0,
        int column = 0)
      : std::runtime_error(Format(code, message, line, column)),
        code_(code),
        line_(line),
        column_(column) {}

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string Format(ErrorCode code, const std::string& message,
                            int line, int column) {
    std::string out(ErrorCodeName(code));
    if (line > 0) {
      out += " at " + std::to_string(line) + ":" + std::to_string(column);
    }
    out += ": " + message;
    return out;
  }

  ErrorCode code_;
  int line_;
  int column_;
};

}  // namespace mbv

#endif  // MBV_ERROR_H_
