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

#include "oos_ase/error.h"

namespace oos_ase {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kModelViolation: return "model-violation";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kDegenerateSpectrum: return "degenerate-spectrum";
    case ErrorKind::kDegenerateAlignment: return "degenerate-alignment";
    case ErrorKind::kDegenerateDistribution: return "degenerate-distribution";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kNotBracketed: return "threshold-not-bracketed";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kModelViolation:
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kSingular:
    case ErrorKind::kDegenerateSpectrum:
    case ErrorKind::kDegenerateAlignment:
    case ErrorKind::kDegenerateDistribution:
    case ErrorKind::kDomain:
      return 3;
    case ErrorKind::kInfeasible:
    case ErrorKind::kNonConvergence:
    case ErrorKind::kNotBracketed:
      return 4;
    case ErrorKind::kIo:
      return 5;
  }
  return 1;
}

}  // namespace oos_ase
