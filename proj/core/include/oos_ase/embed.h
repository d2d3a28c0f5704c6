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

#ifndef OOS_ASE_EMBED_H_
#define OOS_ASE_EMBED_H_

#include "oos_ase/linalg.h"
#include "oos_ase/rdpg.h"

namespace oos_ase {

// Adjacency spectral embedding: positions = U_A S_A^{1/2} for the d retained
// (strictly positive) top eigenpairs of the source matrix.
struct Embedding {
  Matrix positions;  // n x d
  EigenPairs eig;
  int source_order = 0;

  int dimension() const { return static_cast<int>(positions.cols()); }
  int size() const { return static_cast<int>(positions.rows()); }

  // Rebuilds an embedding from positions and eigenvalues alone (the
  // serialized form); eigenvectors are recovered as positions S^{-1/2}.
  static Embedding FromPositions(Matrix positions, Vector eigenvalues);
};

// Throws kDegenerateSpectrum when any of the top d eigenvalues is <= 1e-10.
Embedding Ase(const AdjacencyMatrix& a, int d);

// Same as Ase for an arbitrary real symmetric matrix, e.g. the noiseless
// P = X X^T.
Embedding EmbedSymmetric(const SymMatrix& m, int d);

// Embeds an augmented matrix in full (every vertex in-sample). This is the
// expensive baseline the out-of-sample estimators avoid.
Embedding EmbedFull(const AdjacencyMatrix& atilde, int d);

}  // namespace oos_ase

#endif  // OOS_ASE_EMBED_H_
