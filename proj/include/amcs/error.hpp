/**
 * Copyright 2026 The amcs Authors
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
#ifndef AMCS_ERROR_HPP_
#define AMCS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace amcs {

// Mirrors amcs_status in the C API; values must stay in sync.
enum class ErrorCode : int {
  kNotFound = 1,
  kCorruptFrame = 2,
  kIoError = 3,
  kInvalidSplit = 4,
  kInvalidInput = 5,
  kManifestMismatch = 6,
  kInvalidGroup = 7,
  kInvalidScheme = 8,
  kEvalError = 9,
  kPartialFailure = 10,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Throw(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(ErrorCodeName(code)) + ": " + what);
}

}  // namespace amcs

#endif  // AMCS_ERROR_HPP_
