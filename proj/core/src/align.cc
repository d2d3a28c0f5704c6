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

#include "oos_ase/align.h"

#include <sstream>

#include "oos_ase/error.h"

namespace oos_ase {

ProcrustesResult Procrustes(const Matrix& source, const Matrix& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw Error(ErrorKind::kInvalidInput, "Procrustes: shapes differ");
  }
  if (source.rows() < source.cols() || source.cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "Procrustes: need n >= d >= 1");
  }
  const SvdResult svd = SvdSmall(source.transpose() * target);
  ProcrustesResult out;
  out.rotation = svd.u * svd.v.transpose();
  out.residual = (source * out.rotation - target).norm();
  return out;
}

Matrix CltRotation(const EigenPairs& u_a, const EigenPairs& u_p) {
  if (u_a.vectors.rows() != u_p.vectors.rows() ||
      u_a.vectors.cols() != u_p.vectors.cols()) {
    throw Error(ErrorKind::kInvalidInput, "CltRotation: eigenvector shapes differ");
  }
  const SvdResult svd = SvdSmall(u_a.vectors.transpose() * u_p.vectors);
  const double smallest = svd.singular_values(svd.singular_values.size() - 1);
  if (smallest < 1e-10) {
    std::ostringstream msg;
    msg << "CltRotation: U_A^T U_P is rank deficient (smallest singular value "
        << smallest << ")";
    throw Error(ErrorKind::kDegenerateAlignment, msg.str());
  }
  return svd.u * svd.v.transpose();
}

Matrix CltRotation(const Embedding& emb_a, const EigenPairs& u_p) {
  return CltRotation(emb_a.eig, u_p);
}

Vector AlignEstimate(const Vector& w, const Matrix& rotation) {
  return rotation.transpose() * w;
}

double AlignedError(const OosEstimate& est, const ProcrustesResult& r,
                    const Vector& wbar) {
  return (AlignEstimate(est.w, r.rotation) - wbar).norm();
}

}  // namespace oos_ase
