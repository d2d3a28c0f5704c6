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

#ifndef OOS_ASE_LINALG_H_
#define OOS_ASE_LINALG_H_

#include <Eigen/Dense>

namespace oos_ase {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A real symmetric matrix. Symmetry is exact: the constructor rejects any
// input with entries(i, j) != entries(j, i).
class SymMatrix {
 public:
  explicit SymMatrix(Matrix entries);

  // Builds the matrix from its upper triangle (diagonal included); the lower
  // triangle is mirrored.
  static SymMatrix FromUpper(const Matrix& upper);

  int order() const { return static_cast<int>(entries_.rows()); }
  const Matrix& dense() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// Eigenvalues in descending order with the matching orthonormal eigenvectors
// as columns.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

// The k algebraically largest eigenpairs of m. Dense Householder
// tridiagonalization, implicit symmetric QR for the tridiagonal spectrum,
// then inverse iteration for the k wanted vectors only. Columns follow the
// max-entry-positive sign convention.
EigenPairs TopEigs(const SymMatrix& m, int k);

// Top-k eigenpairs of factor * factor^T without forming the n x n product.
// Requires k <= factor.cols().
EigenPairs TopEigsOfGram(const Matrix& factor, int k);

// Flips each column so that its largest-magnitude entry is positive; on
// exact magnitude ties the lowest row index wins.
void ApplySignConvention(Matrix& vectors);

// argmin_w ||design * w - rhs||. Throws SingularError (carrying the
// condition estimate) when the smallest singular value of design is at or
// below 1e-12 times the largest.
Vector Lstsq(const Matrix& design, const Vector& rhs);

struct SvdResult {
  Matrix u;
  Vector singular_values;  // non-negative, descending
  Matrix v;
};

// Thin SVD of a small (at most 64 x 64) matrix: m = u diag(s) v^T.
SvdResult SvdSmall(const Matrix& m);

}  // namespace oos_ase

#endif  // OOS_ASE_LINALG_H_
