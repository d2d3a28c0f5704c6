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

#ifndef OOS_ASE_RDPG_H_
#define OOS_ASE_RDPG_H_

#include <cstdint>
#include <vector>

#include "oos_ase/linalg.h"
#include "oos_ase/rng.h"

namespace oos_ase {

struct Atom {
  Vector point;
  double weight = 0.0;
};

// Finite mixture of point masses on R^d. Construction validates that the
// weights are a probability vector and that every pairwise inner product of
// atoms lies in [0, 1].
class LatentDistribution {
 public:
  static LatentDistribution Create(std::vector<Atom> atoms);

  int dimension() const { return dimension_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  // min over atom pairs of min(x^T y, 1 - x^T y).
  double feasibility_margin() const { return margin_; }

  // Two-atom mixture lambda * delta_x1 + (1 - lambda) * delta_x2.
  static LatentDistribution TwoPoint(double lambda, const Vector& x1,
                                     const Vector& x2);

 private:
  LatentDistribution() = default;

  int dimension_ = 0;
  std::vector<Atom> atoms_;
  double margin_ = 0.0;
};

struct LatentMatrix {
  Matrix rows;                   // n x d
  std::vector<int> atom_index;   // mixture component of each row
  RngSeed seed;
};

// Symmetric hollow 0/1 matrix stored as packed upper-triangle bits.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(int order);

  int order() const { return order_; }
  bool operator()(int i, int j) const;
  void Set(int i, int j, bool value);

  std::int64_t EdgeCount() const;
  // Edges (i, j) with i < j in row-major order.
  std::vector<std::pair<int, int>> Edges() const;
  Matrix ToDense() const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t BitIndex(int i, int j) const;

  int order_;
  std::vector<std::uint64_t> words_;
};

// Edges from one out-of-sample vertex to the n in-sample vertices, plus the
// vertex's true latent position (kept for evaluation only).
struct EdgeVector {
  std::vector<std::uint8_t> bits;
  Vector truth;

  int size() const { return static_cast<int>(bits.size()); }
  Vector AsVector() const;
};

LatentMatrix SampleLatents(const LatentDistribution& dist, int n, RngSeed seed);

// Independent Bernoulli(X_i^T X_j) edges for i < j. Throws kModelViolation
// naming the first pair whose inner product leaves [0, 1].
AdjacencyMatrix SampleAdjacency(const LatentMatrix& x, RngSeed seed);

EdgeVector SampleOosEdges(const LatentMatrix& x, const Vector& wbar, RngSeed seed);

// Border a with e as the last row and column.
AdjacencyMatrix Augment(const AdjacencyMatrix& a, const EdgeVector& e);

// The first k vertices' induced subgraph.
AdjacencyMatrix LeadingSubgraph(const AdjacencyMatrix& a, int k);

}  // namespace oos_ase

#endif  // OOS_ASE_RDPG_H_
