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

#include "oos_ase/rdpg.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "oos_ase/error.h"

namespace oos_ase {
namespace {

// Inner products within this distance of [0, 1] are clamped rather than
// rejected, so that e.g. a point mass on the unit sphere stays valid.
constexpr double kInnerProductSlack = 1e-12;

double CheckedProbability(double p, int i, int j) {
  if (!(p >= -kInnerProductSlack && p <= 1.0 + kInnerProductSlack)) {
    std::ostringstream msg;
    msg << "inner product of rows " << i << " and " << j << " is " << p
        << ", outside [0, 1]";
    throw Error(ErrorKind::kModelViolation, msg.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

LatentDistribution LatentDistribution::Create(std::vector<Atom> atoms) {
  if (atoms.empty()) {
    throw Error(ErrorKind::kInvalidInput, "distribution needs at least one atom");
  }
  const auto d = atoms.front().point.size();
  if (d == 0) {
    throw Error(ErrorKind::kInvalidInput, "atoms must have dimension >= 1");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const Atom& atom = atoms[k];
    if (atom.point.size() != d) {
      throw Error(ErrorKind::kInvalidInput, "atoms must share one dimension");
    }
    if (!atom.point.allFinite() || !std::isfinite(atom.weight)) {
      throw Error(ErrorKind::kInvalidInput, "atoms must be finite");
    }
    if (!(atom.weight > 0.0)) {
      throw Error(ErrorKind::kInvalidInput, "weights must be positive");
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "weights must sum to 1 (got " << total << ")";
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }
  double margin = 1.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    for (std::size_t b = a; b < atoms.size(); ++b) {
      const double ip = atoms[a].point.dot(atoms[b].point);
      if (ip < 0.0 || ip > 1.0) {
        std::ostringstream msg;
        msg << "inner product of atoms " << a << " and " << b << " is " << ip
            << ", outside [0, 1]";
        throw Error(ErrorKind::kModelViolation, msg.str());
      }
      margin = std::min(margin, std::min(ip, 1.0 - ip));
    }
  }
  LatentDistribution dist;
  dist.dimension_ = static_cast<int>(d);
  dist.atoms_ = std::move(atoms);
  dist.margin_ = margin;
  return dist;
}

LatentDistribution LatentDistribution::TwoPoint(double lambda, const Vector& x1,
                                                const Vector& x2) {
  if (lambda == 1.0) return Create({Atom{x1, 1.0}});
  return Create({Atom{x1, lambda}, Atom{x2, 1.0 - lambda}});
}

AdjacencyMatrix::AdjacencyMatrix(int order) : order_(order) {
  if (order < 1) {
    throw Error(ErrorKind::kInvalidInput, "adjacency matrix order must be >= 1");
  }
  const std::size_t pairs =
      static_cast<std::size_t>(order) * static_cast<std::size_t>(order - 1) / 2;
  words_.assign((pairs + 63) / 64, 0);
}

std::size_t AdjacencyMatrix::BitIndex(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto si = static_cast<std::size_t>(i);
  const auto n = static_cast<std::size_t>(order_);
  return si * n - si * (si + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

bool AdjacencyMatrix::operator()(int i, int j) const {
  if (i == j) return false;
  const std::size_t bit = BitIndex(i, j);
  return (words_[bit / 64] >> (bit % 64)) & 1u;
}

void AdjacencyMatrix::Set(int i, int j, bool value) {
  if (i == j || i < 0 || j < 0 || i >= order_ || j >= order_) {
    throw Error(ErrorKind::kInvalidInput, "adjacency index out of range or on diagonal");
  }
  const std::size_t bit = BitIndex(i, j);
  const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
  if (value) {
    words_[bit / 64] |= mask;
  } else {
    words_[bit / 64] &= ~mask;
  }
}

std::int64_t AdjacencyMatrix::EdgeCount() const {
  std::int64_t count = 0;
  for (std::uint64_t w : words_) count += std::popcount(w);
  return count;
}

std::vector<std::pair<int, int>> AdjacencyMatrix::Edges() const {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(EdgeCount()));
  std::size_t bit = 0;
  for (int i = 0; i < order_; ++i) {
    for (int j = i + 1; j < order_; ++j, ++bit) {
      if ((words_[bit / 64] >> (bit % 64)) & 1u) edges.emplace_back(i, j);
    }
  }
  return edges;
}

Matrix AdjacencyMatrix::ToDense() const {
  Matrix dense = Matrix::Zero(order_, order_);
  for (const auto& [i, j] : Edges()) {
    dense(i, j) = 1.0;
    dense(j, i) = 1.0;
  }
  return dense;
}

Vector EdgeVector::AsVector() const {
  Vector v(size());
  for (int i = 0; i < size(); ++i) v(i) = bits[static_cast<std::size_t>(i)];
  return v;
}

LatentMatrix SampleLatents(const LatentDistribution& dist, int n, RngSeed seed) {
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "SampleLatents: n must be >= 1");
  const auto& atoms = dist.atoms();
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const Atom& atom : atoms) {
    acc += atom.weight;
    cumulative.push_back(acc);
  }
  LatentMatrix out;
  out.rows.resize(n, dist.dimension());
  out.atom_index.resize(static_cast<std::size_t>(n));
  out.seed = seed;
  RandomStream rng(seed);
  for (int i = 0; i < n; ++i) {
    const double u = rng.NextUniform() * acc;
    std::size_t k = 0;
    while (k + 1 < atoms.size() && u >= cumulative[k]) ++k;
    out.atom_index[static_cast<std::size_t>(i)] = static_cast<int>(k);
    out.rows.row(i) = atoms[k].point.transpose();
  }
  return out;
}

AdjacencyMatrix SampleAdjacency(const LatentMatrix& x, RngSeed seed) {
  const auto n = static_cast<int>(x.rows.rows());
  AdjacencyMatrix a(n);
  const Matrix xt = x.rows.transpose();
  RandomStream rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = CheckedProbability(xt.col(i).dot(xt.col(j)), i, j);
      if (rng.NextUniform() < p) a.Set(i, j, true);
    }
  }
  return a;
}

EdgeVector SampleOosEdges(const LatentMatrix& x, const Vector& wbar, RngSeed seed) {
  if (wbar.size() != x.rows.cols()) {
    throw Error(ErrorKind::kInvalidInput, "SampleOosEdges: dimension mismatch");
  }
  const auto n = static_cast<int>(x.rows.rows());
  const Vector probs = x.rows * wbar;
  EdgeVector e;
  e.bits.resize(static_cast<std::size_t>(n));
  e.truth = wbar;
  RandomStream rng(seed);
  for (int i = 0; i < n; ++i) {
    const double p = CheckedProbability(probs(i), i, n);
    e.bits[static_cast<std::size_t>(i)] = rng.NextUniform() < p ? 1 : 0;
  }
  return e;
}

AdjacencyMatrix Augment(const AdjacencyMatrix& a, const EdgeVector& e) {
  if (e.size() != a.order()) {
    throw Error(ErrorKind::kInvalidInput, "Augment: edge vector length differs from order");
  }
  const int n = a.order();
  AdjacencyMatrix out(n + 1);
  for (const auto& [i, j] : a.Edges()) out.Set(i, j, true);
  for (int i = 0; i < n; ++i) {
    if (e.bits[static_cast<std::size_t>(i)]) out.Set(i, n, true);
  }
  return out;
}

AdjacencyMatrix LeadingSubgraph(const AdjacencyMatrix& a, int k) {
  if (k < 1 || k > a.order()) {
    throw Error(ErrorKind::kInvalidInput, "LeadingSubgraph: k out of range");
  }
  AdjacencyMatrix out(k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (a(i, j)) out.Set(i, j, true);
    }
  }
  return out;
}

}  // namespace oos_ase
