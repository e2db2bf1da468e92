/**
 * Copyright 2026 The aciq-toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace aciq {

enum class ErrorCode {
  kInvalidArgument,  // precondition violated by the caller
  kDegenerate,       // numerically degenerate input (zero scale, no optimum, ...)
  kIo,               // file system failure
  kBadMagic,
  kBadHeader,
  kPayloadMismatch,
  kNonFinite,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kBadHeader: return "bad header";
    case ErrorCode::kPayloadMismatch: return "payload length mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool cond, const char* msg, ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!cond) throw Error(code, msg);
}

}  // namespace detail
}  // namespace aciq
