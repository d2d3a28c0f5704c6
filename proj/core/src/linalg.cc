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

#include "oos_ase/linalg.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oos_ase/error.h"

namespace oos_ase {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void RequireFinite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(what) + ": matrix has non-finite entries");
  }
}

// LU factorization with partial pivoting of a symmetric tridiagonal matrix
// shifted by -shift. Row interchanges give U two superdiagonals.
class ShiftedTridiagonalLu {
 public:
  ShiftedTridiagonalLu(const Vector& diag, const Vector& off, double shift,
                       double tiny)
      : n_(static_cast<int>(diag.size())),
        u0_(n_), u1_(n_, 0.0), u2_(n_, 0.0), l_(n_, 0.0), swapped_(n_, 0) {
    double cur_d = diag(0) - shift;
    double cur_s1 = n_ > 1 ? off(0) : 0.0;
    double cur_s2 = 0.0;
    for (int i = 0; i + 1 < n_; ++i) {
      const double sub = off(i);
      const double next_d = diag(i + 1) - shift;
      const double next_s = i + 2 < n_ ? off(i + 1) : 0.0;
      if (std::abs(cur_d) >= std::abs(sub)) {
        if (std::abs(cur_d) < tiny) cur_d = std::copysign(tiny, cur_d);
        u0_[i] = cur_d;
        u1_[i] = cur_s1;
        u2_[i] = cur_s2;
        l_[i] = sub / cur_d;
        const double nd = next_d - l_[i] * cur_s1;
        const double ns = next_s - l_[i] * cur_s2;
        cur_d = nd;
        cur_s1 = ns;
        cur_s2 = 0.0;
      } else {
        swapped_[i] = 1;
        u0_[i] = sub;
        u1_[i] = next_d;
        u2_[i] = next_s;
        l_[i] = cur_d / sub;
        const double nd = cur_s1 - l_[i] * next_d;
        const double ns = cur_s2 - l_[i] * next_s;
        cur_d = nd;
        cur_s1 = ns;
        cur_s2 = 0.0;
      }
    }
    if (std::abs(cur_d) < tiny) cur_d = std::copysign(tiny, cur_d);
    u0_[n_ - 1] = cur_d;
  }

  // Overwrites x with the solution of (T - shift I) x = x.
  void Solve(Vector& x) const {
    for (int i = 0; i + 1 < n_; ++i) {
      if (swapped_[i]) std::swap(x(i), x(i + 1));
      x(i + 1) -= l_[i] * x(i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double acc = x(i);
      if (i + 1 < n_) acc -= u1_[i] * x(i + 1);
      if (i + 2 < n_) acc -= u2_[i] * x(i + 2);
      x(i) = acc / u0_[i];
    }
  }

 private:
  int n_;
  std::vector<double> u0_, u1_, u2_, l_;
  std::vector<char> swapped_;
};

double TridiagonalResidual(const Vector& diag, const Vector& off,
                           const Vector& x, double lambda) {
  const int n = static_cast<int>(diag.size());
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = (diag(i) - lambda) * x(i);
    if (i > 0) r += off(i - 1) * x(i - 1);
    if (i + 1 < n) r += off(i) * x(i + 1);
    sq += r * r;
  }
  return std::sqrt(sq);
}

// Deterministic start vector for inverse iteration, entries in (-1, 1).
Vector StartVector(int n, int which) {
  Vector v(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(which + 1);
  for (int i = 0; i < n; ++i) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    v(i) = static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return v;
}

// Eigenvectors of the tridiagonal (diag, off) for the given eigenvalues
// (descending), by inverse iteration with Gram-Schmidt inside clusters.
Matrix TridiagonalEigenvectors(const Vector& diag, const Vector& off,
                               const Vector& values) {
  const int n = static_cast<int>(diag.size());
  const int k = static_cast<int>(values.size());
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::abs(diag(i));
    if (i > 0) row += std::abs(off(i - 1));
    if (i + 1 < n) row += std::abs(off(i));
    norm = std::max(norm, row);
  }
  const double scale = std::max(norm, std::numeric_limits<double>::min());
  const double tiny = kEps * scale;
  const double cluster_gap = 1e-3 * scale;
  const double perturbation = 10.0 * kEps * scale;

  Matrix vectors(n, k);
  int cluster_start = 0;
  double prev_shift = 0.0;
  for (int j = 0; j < k; ++j) {
    double shift = values(j);
    if (j > 0) {
      if (values(j - 1) - values(j) > cluster_gap) cluster_start = j;
      if (shift >= prev_shift - perturbation) shift = prev_shift - perturbation;
    }
    prev_shift = shift;

    ShiftedTridiagonalLu lu(diag, off, shift, tiny);
    Vector x = StartVector(n, j);
    x.normalize();
    for (int iter = 0; iter < 10; ++iter) {
      lu.Solve(x);
      for (int c = cluster_start; c < j; ++c) {
        x -= vectors.col(c).dot(x) * vectors.col(c);
      }
      const double nrm = x.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        x = StartVector(n, j + 7 * (iter + 1));
        x.normalize();
        continue;
      }
      x /= nrm;
      if (iter >= 1 &&
          TridiagonalResidual(diag, off, x, values(j)) <= 1e-13 * scale) {
        break;
      }
    }
    vectors.col(j) = x;
  }
  return vectors;
}

}  // namespace

SymMatrix::SymMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorKind::kInvalidInput, "SymMatrix: matrix must be square and non-empty");
  }
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (!(entries_(i, j) == entries_(j, i)) &&
          !(std::isnan(entries_(i, j)) && std::isnan(entries_(j, i)))) {
        std::ostringstream msg;
        msg << "SymMatrix: entries (" << i << "," << j << ") and (" << j << ","
            << i << ") differ";
        throw Error(ErrorKind::kInvalidInput, msg.str());
      }
    }
  }
}

SymMatrix SymMatrix::FromUpper(const Matrix& upper) {
  Matrix full = upper.selfadjointView<Eigen::Upper>();
  return SymMatrix(std::move(full));
}

void ApplySignConvention(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenPairs TopEigs(const SymMatrix& m, int k) {
  const int n = m.order();
  if (k < 1 || k > n) {
    throw Error(ErrorKind::kInvalidInput, "TopEigs: k must satisfy 1 <= k <= n");
  }
  RequireFinite(m.dense(), "TopEigs");

  EigenPairs out;
  if (n == 1) {
    out.values = Vector::Constant(1, m(0, 0));
    out.vectors = Matrix::Ones(1, 1);
    return out;
  }

  Eigen::Tridiagonalization<Matrix> tri(m.dense());
  const Vector diag = tri.diagonal();
  const Vector off = tri.subDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> spectrum;
  spectrum.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (spectrum.info() != Eigen::Success) {
    throw Error(ErrorKind::kNonConvergence, "TopEigs: tridiagonal QR did not converge");
  }
  const Vector& ascending = spectrum.eigenvalues();
  out.values = ascending.tail(k).reverse();

  const Matrix tri_vectors = TridiagonalEigenvectors(diag, off, out.values);
  out.vectors = tri.matrixQ() * tri_vectors;
  ApplySignConvention(out.vectors);
  return out;
}

EigenPairs TopEigsOfGram(const Matrix& factor, int k) {
  const auto r = static_cast<int>(factor.cols());
  if (k < 1 || k > r || factor.rows() < r) {
    throw Error(ErrorKind::kInvalidInput,
                "TopEigsOfGram: need 1 <= k <= cols <= rows");
  }
  RequireFinite(factor, "TopEigsOfGram");
  Eigen::HouseholderQR<Matrix> qr(factor);
  const Matrix q = qr.householderQ() * Matrix::Identity(factor.rows(), r);
  const Matrix upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::SelfAdjointEigenSolver<Matrix> small(upper * upper.transpose());
  EigenPairs out;
  out.values = small.eigenvalues().tail(k).reverse();
  out.vectors = q * small.eigenvectors().rightCols(k).rowwise().reverse();
  ApplySignConvention(out.vectors);
  return out;
}

Vector Lstsq(const Matrix& design, const Vector& rhs) {
  if (design.rows() != rhs.size()) {
    throw Error(ErrorKind::kInvalidInput, "Lstsq: design rows and rhs length differ");
  }
  if (design.cols() == 0 || design.rows() < design.cols()) {
    throw SingularError("Lstsq: design has fewer rows than columns",
                        std::numeric_limits<double>::infinity());
  }
  RequireFinite(design, "Lstsq");
  Eigen::HouseholderQR<Matrix> qr(design);
  const Eigen::Index d = design.cols();
  const Matrix upper = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const Vector sv = Eigen::JacobiSVD<Matrix>(upper).singularValues();
  const double largest = sv(0);
  const double smallest = sv(d - 1);
  if (!(smallest > 1e-12 * largest)) {
    const double condition =
        smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "Lstsq: design is rank deficient (condition estimate " << condition << ")";
    throw SingularError(msg.str(), condition);
  }
  Vector w = qr.solve(rhs);
  // One round of iterative refinement on the residual.
  const Vector residual = rhs - design * w;
  w += qr.solve(residual);
  return w;
}

SvdResult SvdSmall(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0 || m.rows() > 64 || m.cols() > 64) {
    throw Error(ErrorKind::kInvalidInput, "SvdSmall: dimensions must be in [1, 64]");
  }
  RequireFinite(m, "SvdSmall");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace oos_ase
