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

#ifndef OOS_ASE_ALIGN_H_
#define OOS_ASE_ALIGN_H_

#include "oos_ase/embed.h"
#include "oos_ase/linalg.h"
#include "oos_ase/oos.h"

namespace oos_ase {

// Orientation convention used throughout: positions are rows, and
// Procrustes(source, target) returns R minimizing ||source R - target||_F.
// A column estimate w in the source frame maps to the target frame as
// R^T w (equivalently w^T R as a row).
struct ProcrustesResult {
  Matrix rotation;   // d x d orthogonal
  double residual;   // ||source R - target||_F
};

ProcrustesResult Procrustes(const Matrix& source, const Matrix& target);

// V = V_A V_P^T where V_A S V_P^T is the SVD of U_A^T U_P. Throws
// kDegenerateAlignment when the smallest singular value is below 1e-10.
Matrix CltRotation(const Embedding& emb_a, const EigenPairs& u_p);
Matrix CltRotation(const EigenPairs& u_a, const EigenPairs& u_p);

// R^T w.
Vector AlignEstimate(const Vector& w, const Matrix& rotation);

// ||R^T est.w - wbar||.
double AlignedError(const OosEstimate& est, const ProcrustesResult& r,
                    const Vector& wbar);

}  // namespace oos_ase

#endif  // OOS_ASE_ALIGN_H_
