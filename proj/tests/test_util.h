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

#ifndef OOS_ASE_TESTS_TEST_UTIL_H_
#define OOS_ASE_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "oos_ase/linalg.h"
#include "oos_ase/rdpg.h"

namespace oos_ase::testing {

inline Vector Vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// The two-block mixture used throughout the simulations.
inline Vector MixtureX1() { return Vec({0.2, 0.7}); }
inline Vector MixtureX2() { return Vec({0.65, 0.3}); }
inline constexpr double kMixtureLambda = 0.4;

inline LatentDistribution Mixture() {
  return LatentDistribution::TwoPoint(kMixtureLambda, MixtureX1(), MixtureX2());
}

inline Matrix RandomMatrix(std::mt19937_64& gen, int rows, int cols, double lo = -1.0,
                           double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = u(gen);
  }
  return m;
}

inline Matrix RandomOrthogonal(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> z;
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = z(gen);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the QR sign ambiguity so q is Haar distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

inline double MaxAbs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline LatentMatrix SampleMixture(int n, std::uint64_t key, std::uint64_t stream = 1) {
  return SampleLatents(Mixture(), n, RngSeed{key, stream});
}

}  // namespace oos_ase::testing

#endif  // OOS_ASE_TESTS_TEST_UTIL_H_
