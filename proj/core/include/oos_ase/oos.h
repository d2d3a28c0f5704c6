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

#ifndef OOS_ASE_OOS_H_
#define OOS_ASE_OOS_H_

#include <optional>
#include <string>
#include <string_view>

#include "oos_ase/embed.h"
#include "oos_ase/error.h"
#include "oos_ase/linalg.h"
#include "oos_ase/rdpg.h"

namespace oos_ase {

enum class OosMethod { kLeastSquares, kMaximumLikelihood };

// "LS" / "ML".
std::string_view MethodName(OosMethod method);
OosMethod ParseMethod(std::string_view name);  // accepts ls/LS/ml/ML

struct OosDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  int active_constraints = 0;
  std::optional<double> objective;  // ML only
  std::string initializer;          // ML only: "ls" or "chebyshev"
};

struct OosEstimate {
  Vector w;
  OosMethod method = OosMethod::kLeastSquares;
  OosDiagnostics diagnostics;
};

// Solver failures that carry the state reached so far.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& message, Vector last_iterate,
              OosDiagnostics diagnostics)
      : Error(kind, message),
        last_iterate_(std::move(last_iterate)),
        diagnostics_(std::move(diagnostics)) {}

  const Vector& last_iterate() const { return last_iterate_; }
  const OosDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  Vector last_iterate_;
  OosDiagnostics diagnostics_;
};

// The polytope {w : eps <= X_i^T w <= 1 - eps for all rows X_i}. Holds a
// reference to the positions, which must outlive the box.
class FeasibleBox {
 public:
  FeasibleBox(const Matrix& positions, double epsilon);

  double epsilon() const { return epsilon_; }
  int constraint_count() const { return 2 * static_cast<int>(positions_->rows()); }

  // min_i min(X_i^T w - eps, 1 - eps - X_i^T w); >= 0 iff w is inside.
  double Margin(const Vector& w) const;
  bool Contains(const Vector& w, double slack = 1e-9) const {
    return Margin(w) >= -slack;
  }
  // Constraints within tol of their bound.
  int ActiveCount(const Vector& w, double tol) const;

  struct Center {
    Vector w;
    double margin;
  };
  // Maximizer of Margin (a Chebyshev-style center) by a log-barrier ascent
  // over (w, t). margin < 0 means the box is empty.
  Center ChebyshevCenter(const Vector& start) const;

 private:
  const Matrix* positions_;
  double epsilon_;
};

struct LikelihoodValue {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

// l(w) = sum_i a_i log(X_i^T w) + (1 - a_i) log(1 - X_i^T w) with gradient
// and Hessian. a may be fractional (the noiseless path passes X w directly).
// Throws kDomain unless 0 < X_i^T w < 1 for every row.
LikelihoodValue Likelihood(const Matrix& positions, const Vector& a,
                           const Vector& w);
LikelihoodValue Likelihood(const Embedding& emb, const EdgeVector& a,
                           const Vector& w);

// Least-squares extension S_A^{-1/2} U_A^T a. O(d n); touches no n x n data.
OosEstimate LlsOos(const Embedding& emb, const Vector& a);
OosEstimate LlsOos(const Embedding& emb, const EdgeVector& a);

struct MlOptions {
  double epsilon = 0.05;
  // Projected-gradient tolerance; <= 0 selects 1e-8 * n.
  double tol = 0.0;
  int max_iter = 500;
};

// Constrained maximum-likelihood extension: argmax of l over the feasible
// box. Active-set damped Newton ascent started from the LS estimate (or, when
// that is infeasible, from the LS point pulled toward the box's center).
// Throws SolverError(kInfeasible) for an empty box and
// SolverError(kNonConvergence) after max_iter iterations.
OosEstimate MlOos(const Embedding& emb, const Vector& a, const MlOptions& opts = {});
OosEstimate MlOos(const Embedding& emb, const EdgeVector& a,
                  const MlOptions& opts = {});

}  // namespace oos_ase

#endif  // OOS_ASE_OOS_H_
