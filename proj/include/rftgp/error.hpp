// Copyright 2026 The rftgp Authors
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

#ifndef RFTGP_ERROR_HPP_
#define RFTGP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rftgp {

enum class ErrorCode {
  kInvalidSpec,    // geometry / trajectory / kernel parameters out of range
  kConfig,         // malformed or unknown configuration keys
  kDimension,      // mismatched array sizes
  kNumerical,      // factorization failure after jitter escalation
  kSingular,       // Jacobian above the condition-number threshold
  kDegenerateFit,  // rank-deficient least-squares design
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Process exit code used by the CLI: 2 config, 3 numerical, 4 I/O.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kConfig:
      return 2;
    case ErrorCode::kIo:
      return 4;
    default:
      return 3;
  }
}

}  // namespace rftgp

#endif  // RFTGP_ERROR_HPP_
