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

#include "oos_ase/clt_theory.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oos_ase/error.h"
#include "test_util.h"

namespace oos_ase {
namespace {

using testing::MaxAbs;
using testing::Mixture;
using testing::MixtureX1;
using testing::MixtureX2;
using testing::Vec;

const ClassifySpec kTwoClassSpec{0.4, 0.6, 0.61};

TEST(DeltaTest, PointMass) {
  const Vector x = Vec({0.3, 0.4});
  const auto dist = LatentDistribution::Create({Atom{x, 1.0}});
  EXPECT_LE(MaxAbs(Delta(dist) - x * x.transpose()), 1e-16);
}

TEST(DeltaTest, OneDimensionalSpec) {
  EXPECT_NEAR(Delta(kTwoClassSpec.Distribution())(0, 0), 0.36726, 1e-15);
}

TEST(DeltaTest, MonteCarloSecondMoment) {
  const LatentMatrix x = SampleLatents(Mixture(), 1000000, RngSeed{12, 1});
  const Matrix empirical = x.rows.transpose() * x.rows / 1e6;
  EXPECT_LE(MaxAbs(empirical - Delta(Mixture())), 1e-2);
}

// Values from an independent evaluation of the finite-mixture formula.
TEST(SigmaCltTest, MixtureAtoms) {
  Matrix s1(2, 2), s2(2, 2);
  s1 << 1.5338, -1.1139, -1.1139, 1.7822;
  s2 << 1.6313, -1.0748, -1.0748, 1.6259;
  EXPECT_LE(MaxAbs(SigmaClt(Mixture(), MixtureX1()) - s1), 1e-4);
  EXPECT_LE(MaxAbs(SigmaClt(Mixture(), MixtureX2()) - s2), 1e-4);
}

TEST(SigmaCltTest, OneDimensionalClassVariance) {
  const double lambda = 0.4, p = 0.6, q = 0.61;
  const double delta = lambda * p * p + (1 - lambda) * q * q;
  const double sigma_p2 =
      (lambda * p * p * (1 - p * p) * p * p + (1 - lambda) * p * q * (1 - p * q) * q * q) /
      (delta * delta);
  EXPECT_NEAR(SigmaClt(kTwoClassSpec.Distribution(), Vec({p}))(0, 0), sigma_p2, 1e-14);
  const ClassVariances v = ClassVariancesFor(kTwoClassSpec);
  EXPECT_NEAR(v.sigma_p2, sigma_p2, 1e-14);
  EXPECT_NEAR(v.sigma_p2, 0.63007, 1e-5);
  EXPECT_NEAR(v.sigma_q2, 0.63447, 1e-5);
}

TEST(SigmaCltTest, VanishingBernoulliVariance) {
  const auto dist = LatentDistribution::Create(
      {Atom{Vec({1.0, 0.0}), 0.5}, Atom{Vec({0.0, 1.0}), 0.5}});
  EXPECT_EQ(MaxAbs(SigmaClt(dist, Vec({1.0, 0.0}))), 0.0);
}

TEST(SigmaCltTest, SingularSecondMoment) {
  const auto dist = LatentDistribution::Create({Atom{Vec({0.5, 0.5}), 1.0}});
  try {
    SigmaClt(dist, Vec({0.5, 0.5}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateDistribution);
  }
}

TEST(AsymptoticNormalTest, ChiSquareQuantilesAndMahalanobis) {
  EXPECT_NEAR(ChiSquare2Quantile(0.68), 2.2789, 1e-4);
  EXPECT_NEAR(ChiSquare2Quantile(0.95), 5.9915, 1e-4);
  const AsymptoticNormal limit = OosLimitingNormal(Mixture(), MixtureX1(), 500.0);
  EXPECT_LE(MaxAbs(limit.covariance * 500.0 - SigmaClt(Mixture(), MixtureX1())), 1e-15);
  const Vector x = MixtureX1() + Vec({0.01, -0.02});
  const Vector diff = x - MixtureX1();
  EXPECT_NEAR(limit.Mahalanobis2(x), diff.dot(limit.covariance.inverse() * diff), 1e-10);
  EXPECT_NEAR(NormalCdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(NormalCdf(1.959963984540054), 0.975, 1e-12);
}

TEST(ClassifyThresholdTest, SymmetricMidpoint) {
  const ClassifySpec spec{0.5, 0.3, 0.5};
  const ClassVariances equal{0.2, 0.2};
  EXPECT_NEAR(ClassifyThreshold(spec, equal, 10.0), 0.4, 1e-12);
  EXPECT_NEAR(ClassifyThreshold(spec, equal, 1e8), 0.4, 1e-12);
}

TEST(ClassifyThresholdTest, GridScanOracle) {
  const double x_star = ClassifyThreshold(kTwoClassSpec, 101.0);
  EXPECT_NEAR(x_star, 0.32633, 1e-5);
  // Dense scan for the sign change nearest the returned root.
  double crossing = NAN;
  double prev = LogDensityDifference(kTwoClassSpec, 101.0, x_star - 0.01);
  for (int k = 1; k <= 20000; ++k) {
    const double x = x_star - 0.01 + k * 1e-6;
    const double cur = LogDensityDifference(kTwoClassSpec, 101.0, x);
    if ((cur > 0) != (prev > 0)) {
      crossing = x;
      break;
    }
    prev = cur;
  }
  ASSERT_FALSE(std::isnan(crossing));
  EXPECT_LE(std::abs(crossing - x_star), 1e-6);
  EXPECT_LE(std::abs(LogDensityDifference(kTwoClassSpec, 101.0, x_star)), 1e-12);
}

TEST(ClassifyThresholdTest, LargerScales) {
  EXPECT_NEAR(ClassifyThreshold(kTwoClassSpec, 1001.0), 0.57937, 1e-5);
  EXPECT_NEAR(ClassifyThreshold(kTwoClassSpec, 10001.0), 0.60245, 1e-5);
}

TEST(ClassifyErrorTest, SeparatedClasses) {
  EXPECT_LT(ClassifyError(ClassifySpec{0.4, 0.1, 0.9}, 1000.0), 1e-6);
}

TEST(ClassifyErrorTest, OverlappingClasses) {
  const ClassifySpec spec{0.4, 0.6, 0.600001};
  EXPECT_NEAR(ClassifyError(spec, 100.0), 0.4, 1e-3);
  try {
    ClassifyThreshold(spec, 100.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotBracketed);
  }
}

TEST(ClassifyErrorTest, IndependentValues) {
  EXPECT_NEAR(ClassifyError(kTwoClassSpec, 101.0), 0.39999737, 1e-7);
  EXPECT_NEAR(ClassifyError(kTwoClassSpec, 1001.0), 0.38494, 1e-5);
  EXPECT_NEAR(ClassifyError(kTwoClassSpec, 10001.0), 0.25447, 1e-5);
}

TEST(ClassifyErrorTest, MoreVerticesNeverHurt) {
  for (int n : {100, 1000, 10000}) {
    const double base = ClassifyError(kTwoClassSpec, n + 1.0);
    for (int m = 2; m <= 10000; ++m) {
      ASSERT_LT(ClassifyError(kTwoClassSpec, static_cast<double>(n + m)), base)
          << "n=" << n << " m=" << m;
    }
  }
}

TEST(ErrorRatioCurveTest, ShapeAndValues) {
  const std::vector<int> grid{1, 2, 10, 100, 1000, 10000};
  const std::vector<std::vector<double>> expected{
      {1.0, 0.99999936, 0.9999924, 0.99943, 0.9568, 0.6338},
      {1.0, 0.99994, 0.99947, 0.99417, 0.9436, 0.6370},
      {1.0, 0.99996, 0.99966, 0.99628, 0.9635, 0.7111}};
  const int ns[] = {100, 1000, 10000};
  for (int k = 0; k < 3; ++k) {
    const auto curve = ErrorRatioCurve(kTwoClassSpec, ns[k], grid);
    ASSERT_EQ(curve.size(), grid.size());
    EXPECT_EQ(curve[0].ratio, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_EQ(curve[i].m, grid[i]);
      EXPECT_NEAR(curve[i].ratio, expected[static_cast<std::size_t>(k)][i],
                  5e-5 * (i > 3 ? 10 : 1))
          << "n=" << ns[k] << " m=" << grid[i];
    }
  }
}

TEST(ErrorRatioCurveTest, NonIncreasingOnDenseGrid) {
  std::vector<int> grid;
  for (int m = 1; m <= 10000; ++m) grid.push_back(m);
  for (int n : {100, 1000, 10000}) {
    const auto curve = ErrorRatioCurve(kTwoClassSpec, n, grid);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      ASSERT_LE(curve[i].ratio, curve[i - 1].ratio) << "n=" << n << " m=" << curve[i].m;
    }
  }
}

// Ordering across n is not uniform: n = 1000 sits below n = 100 for small m,
// while n = 10000 stays above n = 1000 everywhere.
TEST(ErrorRatioCurveTest, OrderingAcrossGraphSizes) {
  std::vector<int> grid;
  for (int m = 1; m <= 10000; m += 7) grid.push_back(m);
  const auto c100 = ErrorRatioCurve(kTwoClassSpec, 100, grid);
  const auto c1000 = ErrorRatioCurve(kTwoClassSpec, 1000, grid);
  const auto c10000 = ErrorRatioCurve(kTwoClassSpec, 10000, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_GE(c10000[i].ratio, c1000[i].ratio) << "m=" << grid[i];
  }
  const int m10[] = {10};
  EXPECT_LT(ErrorRatioCurve(kTwoClassSpec, 1000, m10)[0].ratio,
            ErrorRatioCurve(kTwoClassSpec, 100, m10)[0].ratio);
}

TEST(ClassifySpecTest, Validation) {
  EXPECT_THROW((ClassifySpec{0.4, 0.6, 0.6}.Validate()), Error);
  EXPECT_THROW((ClassifySpec{1.0, 0.2, 0.6}.Validate()), Error);
  EXPECT_NO_THROW(kTwoClassSpec.Validate());
}

}  // namespace
}  // namespace oos_ase
