// Copyright 2026 The OOS-ASE Authors.
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

#ifndef OOS_ASE_ERROR_H_
#define OOS_ASE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace oos_ase {

// Failure categories. Each maps onto one CLI exit code (see ExitCodeFor).
enum class ErrorKind {
  kInvalidInput,
  kModelViolation,
  kSingular,
  kDegenerateSpectrum,
  kDegenerateAlignment,
  kDegenerateDistribution,
  kDomain,
  kInfeasible,
  kNonConvergence,
  kNotBracketed,
  kConfig,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Process exit code for an error: 2 config, 3 numerical degeneracy,
// 4 solver, 5 I/O.
int ExitCodeFor(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by Lstsq when the design is numerically rank deficient.
class SingularError : public Error {
 public:
  SingularError(const std::string& message, double condition)
      : Error(ErrorKind::kSingular, message), condition_(condition) {}

  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace oos_ase

#endif  // OOS_ASE_ERROR_H_
