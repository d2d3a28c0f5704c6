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

#include "oos_ase/embed.h"

#include <sstream>
#include <utility>

#include "oos_ase/error.h"

namespace oos_ase {
namespace {

constexpr double kMinEigenvalue = 1e-10;

Embedding FromEigenPairs(EigenPairs eig, int source_order) {
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (!(eig.values(k) > kMinEigenvalue)) {
      std::ostringstream msg;
      msg << "eigenvalue " << k + 1 << " of the top " << eig.values.size()
          << " is " << eig.values(k) << "; embedding needs it positive";
      throw Error(ErrorKind::kDegenerateSpectrum, msg.str());
    }
  }
  Embedding emb;
  emb.positions = eig.vectors * eig.values.cwiseSqrt().asDiagonal();
  emb.eig = std::move(eig);
  emb.source_order = source_order;
  return emb;
}

}  // namespace

Embedding Embedding::FromPositions(Matrix positions, Vector eigenvalues) {
  if (positions.cols() != eigenvalues.size() || positions.rows() == 0) {
    throw Error(ErrorKind::kInvalidInput,
                "embedding positions and eigenvalue count differ");
  }
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (!(eigenvalues(k) > kMinEigenvalue)) {
      throw Error(ErrorKind::kDegenerateSpectrum,
                  "embedding eigenvalues must be positive");
    }
  }
  Embedding emb;
  emb.eig.vectors = positions * eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  emb.eig.values = std::move(eigenvalues);
  emb.source_order = static_cast<int>(positions.rows());
  emb.positions = std::move(positions);
  return emb;
}

Embedding EmbedSymmetric(const SymMatrix& m, int d) {
  if (d < 1 || d > m.order()) {
    throw Error(ErrorKind::kInvalidInput, "embedding dimension must satisfy 1 <= d <= n");
  }
  return FromEigenPairs(TopEigs(m, d), m.order());
}

Embedding Ase(const AdjacencyMatrix& a, int d) {
  if (d < 1 || d > a.order()) {
    throw Error(ErrorKind::kInvalidInput, "embedding dimension must satisfy 1 <= d <= n");
  }
  return EmbedSymmetric(SymMatrix(a.ToDense()), d);
}

Embedding EmbedFull(const AdjacencyMatrix& atilde, int d) { return Ase(atilde, d); }

}  // namespace oos_ase
