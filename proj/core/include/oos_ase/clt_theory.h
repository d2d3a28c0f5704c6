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

#ifndef OOS_ASE_CLT_THEORY_H_
#define OOS_ASE_CLT_THEORY_H_

#include <span>
#include <vector>

#include "oos_ase/linalg.h"
#include "oos_ase/rdpg.h"

namespace oos_ase {

// Second-moment matrix E[X X^T] of the latent distribution.
Matrix Delta(const LatentDistribution& dist);

// Limiting covariance of sqrt(n) (aligned LS estimate - wbar):
//   Delta^{-1} E[(X^T wbar)(1 - X^T wbar) X X^T] Delta^{-1}.
// Throws kDegenerateDistribution when Delta is singular.
Matrix SigmaClt(const LatentDistribution& dist, const Vector& wbar);

// N(mean, covariance) with covariance = Sigma / scale.
struct AsymptoticNormal {
  Vector mean;
  Matrix covariance;
  double scale = 1.0;

  // (x - mean)^T covariance^{-1} (x - mean).
  double Mahalanobis2(const Vector& x) const;
};

AsymptoticNormal OosLimitingNormal(const LatentDistribution& dist,
                                   const Vector& wbar, double scale);

// Quantile of the chi-square distribution with 2 degrees of freedom.
double ChiSquare2Quantile(double probability);

// Standard normal cdf, via erfc.
double NormalCdf(double z);

// One-dimensional two-class model lambda delta_p + (1 - lambda) delta_q.
struct ClassifySpec {
  double lambda = 0.5;
  double p = 0.0;
  double q = 0.0;

  // Throws kInvalidInput unless 0 < p < q < 1 and 0 < lambda < 1.
  void Validate() const;
  LatentDistribution Distribution() const;
};

struct ClassVariances {
  double sigma_p2;
  double sigma_q2;
};

ClassVariances ClassVariancesFor(const ClassifySpec& spec);

// log(lambda phi(x; p, sigma_p^2/scale)) - log((1-lambda) phi(x; q, sigma_q^2/scale)).
double LogDensityDifference(const ClassifySpec& spec, double scale, double x);

// Decision boundary of the likelihood-ratio classifier: the real root of
// LogDensityDifference nearest (p + q) / 2, refined to |f| <= 1e-12. At small
// scales with unequal weights this root lies outside [p, q]. Throws
// kNotBracketed when no real root exists.
double ClassifyThreshold(const ClassifySpec& spec, double scale);
// Same, with the class variances supplied instead of derived from the spec.
double ClassifyThreshold(const ClassifySpec& spec, const ClassVariances& variances,
                         double scale);

// Approximate misclassification probability at the given effective sample
// count:
//   lambda (1 - Phi(sqrt(s)(x* - p)/sigma_p)) + (1 - lambda) Phi(sqrt(s)(x* - q)/sigma_q).
// When the log-density difference has no real root the classifier is
// constant and the error is the weight of the class it never picks.
double ClassifyError(const ClassifySpec& spec, double scale);
double ClassifyError(const ClassifySpec& spec, const ClassVariances& variances,
                     double scale);

struct RatioPoint {
  int m;
  double ratio;
};

// ratio(m) = eta(n + m) / eta(n + 1): full re-embedding error over the
// out-of-sample error.
std::vector<RatioPoint> ErrorRatioCurve(const ClassifySpec& spec, int n,
                                        std::span<const int> m_grid);

}  // namespace oos_ase

#endif  // OOS_ASE_CLT_THEORY_H_
