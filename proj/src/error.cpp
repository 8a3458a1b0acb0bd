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
#include "amcs/error.hpp"

namespace amcs {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kCorruptFrame: return "CorruptFrame";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidSplit: return "InvalidSplit";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kManifestMismatch: return "ManifestMismatch";
    case ErrorCode::kInvalidGroup: return "InvalidGroup";
    case ErrorCode::kInvalidScheme: return "InvalidScheme";
    case ErrorCode::kEvalError: return "EvalError";
    case ErrorCode::kPartialFailure: return "PartialFailure";
  }
  return "Unknown";
}

}  // namespace amcs
