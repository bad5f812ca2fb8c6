// Copyright 2026 The SlsBench Authors
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

#include "slsbench/error.hpp"

namespace slsbench {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "invalid-argument";
        case ErrorCode::kPrecondition: return "precondition";
        case ErrorCode::kNotFound: return "not-found";
        case ErrorCode::kUnsupported: return "unsupported";
        case ErrorCode::kConfiguration: return "configuration";
        case ErrorCode::kNoValidMemory: return "no-valid-memory";
        case ErrorCode::kProvider: return "provider";
        case ErrorCode::kIo: return "io";
        case ErrorCode::kSchema: return "schema";
        case ErrorCode::kEmptyGroup: return "empty-group";
        case ErrorCode::kResource: return "resource";
    }
    return "unknown";
}

}  // namespace slsbench
