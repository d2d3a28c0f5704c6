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
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "oos_ase/error.h"

namespace oos_ase {

Matrix Delta(const LatentDistribution& dist) {
  const int d = dist.dimension();
  Matrix delta = Matrix::Zero(d, d);
  for (const Atom& atom : dist.atoms()) {
    delta += atom.weight * atom.point * atom.point.transpose();
  }
  return delta;
}

Matrix SigmaClt(const LatentDistribution& dist, const Vector& wbar) {
  if (wbar.size() != dist.dimension()) {
    throw Error(ErrorKind::kInvalidInput, "SigmaClt: wbar dimension mismatch");
  }
  const Matrix delta = Delta(dist);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(delta);
  if (!(eig.eigenvalues().minCoeff() > 1e-12)) {
    std::ostringstream msg;
    msg << "SigmaClt: second-moment matrix is singular (smallest eigenvalue "
        << eig.eigenvalues().minCoeff() << ")";
    throw Error(ErrorKind::kDegenerateDistribution, msg.str());
  }
  const int d = dist.dimension();
  Matrix middle = Matrix::Zero(d, d);
  for (const Atom& atom : dist.atoms()) {
    const double p = atom.point.dot(wbar);
    middle += atom.weight * p * (1.0 - p) * atom.point * atom.point.transpose();
  }
  const Matrix inv = eig.eigenvectors() *
                     eig.eigenvalues().cwiseInverse().asDiagonal() *
                     eig.eigenvectors().transpose();
  Matrix sigma = inv * middle * inv;
  return 0.5 * (sigma + sigma.transpose());
}

double AsymptoticNormal::Mahalanobis2(const Vector& x) const {
  const Vector diff = x - mean;
  return diff.dot(covariance.ldlt().solve(diff));
}

AsymptoticNormal OosLimitingNormal(const LatentDistribution& dist,
                                   const Vector& wbar, double scale) {
  return AsymptoticNormal{wbar, SigmaClt(dist, wbar) / scale, scale};
}

double ChiSquare2Quantile(double probability) {
  return -2.0 * std::log1p(-probability);
}

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void ClassifySpec::Validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "classify spec: lambda must lie in (0, 1)");
  }
  if (!(p > 0.0 && p < q && q < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "classify spec: need 0 < p < q < 1");
  }
}

LatentDistribution ClassifySpec::Distribution() const {
  Validate();
  return LatentDistribution::TwoPoint(lambda, Vector::Constant(1, p),
                                      Vector::Constant(1, q));
}

ClassVariances ClassVariancesFor(const ClassifySpec& spec) {
  const LatentDistribution dist = spec.Distribution();
  return ClassVariances{SigmaClt(dist, Vector::Constant(1, spec.p))(0, 0),
                        SigmaClt(dist, Vector::Constant(1, spec.q))(0, 0)};
}

namespace {

struct Quadratic {
  double a2, a1, a0;
  double operator()(double x) const { return (a2 * x + a1) * x + a0; }
  double Derivative(double x) const { return 2.0 * a2 * x + a1; }
};

Quadratic LogDifferenceCoefficients(const ClassifySpec& spec, const ClassVariances& v,
                                    double scale) {
  const double ip = 1.0 / v.sigma_p2;
  const double iq = 1.0 / v.sigma_q2;
  return Quadratic{
      0.5 * scale * (iq - ip),
      scale * (spec.p * ip - spec.q * iq),
      std::log(spec.lambda / (1.0 - spec.lambda)) + 0.5 * std::log(v.sigma_q2 / v.sigma_p2) -
          0.5 * scale * spec.p * spec.p * ip + 0.5 * scale * spec.q * spec.q * iq};
}

double EvalLogDifference(const ClassifySpec& spec, const ClassVariances& v,
                         double scale, double x) {
  const double dp = x - spec.p;
  const double dq = x - spec.q;
  return std::log(spec.lambda / (1.0 - spec.lambda)) +
         0.5 * std::log(v.sigma_q2 / v.sigma_p2) -
         0.5 * scale * dp * dp / v.sigma_p2 + 0.5 * scale * dq * dq / v.sigma_q2;
}

double Threshold(const ClassifySpec& spec, const ClassVariances& v, double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "classification scale must be positive");
  }
  const Quadratic f = LogDifferenceCoefficients(spec, v, scale);
  const double mid = 0.5 * (spec.p + spec.q);

  // Closed-form root selection, then a safeguarded Newton/bisection polish on
  // the directly evaluated log-difference.
  double root;
  double other = std::numeric_limits<double>::infinity();
  if (std::abs(f.a2) <= 1e-14 * std::abs(f.a1)) {
    root = -f.a0 / f.a1;
  } else {
    const double disc = f.a1 * f.a1 - 4.0 * f.a2 * f.a0;
    if (disc < 0.0) {
      throw Error(ErrorKind::kNotBracketed,
                  "classification threshold: log-density difference has no real root");
    }
    const double qq = -0.5 * (f.a1 + std::copysign(std::sqrt(disc), f.a1));
    const double r1 = qq / f.a2;
    const double r2 = f.a0 / qq;
    root = std::abs(r1 - mid) <= std::abs(r2 - mid) ? r1 : r2;
    other = root == r1 ? r2 : r1;
  }

  const double half_gap = std::isfinite(other) ? 0.5 * std::abs(other - root)
                                               : 1.0 + std::abs(root);
  double lo = root - half_gap;
  double hi = root + half_gap;
  auto g = [&](double x) { return EvalLogDifference(spec, v, scale, x); };
  double g_lo = g(lo);
  if ((g_lo > 0.0) == (g(hi) > 0.0)) {
    throw Error(ErrorKind::kNotBracketed,
                "classification threshold: no sign change around the root");
  }
  double x = root;
  for (int iter = 0; iter < 200; ++iter) {
    const double gx = g(x);
    if (std::abs(gx) <= 1e-12) return x;
    if ((gx > 0.0) == (g_lo > 0.0)) {
      lo = x;
      g_lo = gx;
    } else {
      hi = x;
    }
    double next = x - gx / f.Derivative(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return x;
    }
    x = next;
  }
  return x;
}

double ErrorFor(const ClassifySpec& spec, const ClassVariances& v, double scale) {
  const Quadratic f = LogDifferenceCoefficients(spec, v, scale);
  if (f.a1 * f.a1 - 4.0 * f.a2 * f.a0 < 0.0 && scale > 0.0) {
    // One weighted density dominates everywhere, so every vertex gets that
    // class and the error is the other class's weight.
    return f(0.5 * (spec.p + spec.q)) > 0.0 ? 1.0 - spec.lambda : spec.lambda;
  }
  const double x = Threshold(spec, v, scale);
  const double rs = std::sqrt(scale);
  const double sp = std::sqrt(v.sigma_p2);
  const double sq = std::sqrt(v.sigma_q2);
  // 1 - Phi(z) written as Phi(-z) to keep the upper tail accurate.
  return spec.lambda * NormalCdf(-rs * (x - spec.p) / sp) +
         (1.0 - spec.lambda) * NormalCdf(rs * (x - spec.q) / sq);
}

}  // namespace

double LogDensityDifference(const ClassifySpec& spec, double scale, double x) {
  return EvalLogDifference(spec, ClassVariancesFor(spec), scale, x);
}

double ClassifyThreshold(const ClassifySpec& spec, double scale) {
  return Threshold(spec, ClassVariancesFor(spec), scale);
}

double ClassifyThreshold(const ClassifySpec& spec, const ClassVariances& variances,
                         double scale) {
  if (!(variances.sigma_p2 > 0.0 && variances.sigma_q2 > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "class variances must be positive");
  }
  return Threshold(spec, variances, scale);
}

double ClassifyError(const ClassifySpec& spec, double scale) {
  return ErrorFor(spec, ClassVariancesFor(spec), scale);
}

double ClassifyError(const ClassifySpec& spec, const ClassVariances& variances,
                     double scale) {
  if (!(variances.sigma_p2 > 0.0 && variances.sigma_q2 > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "class variances must be positive");
  }
  return ErrorFor(spec, variances, scale);
}

std::vector<RatioPoint> ErrorRatioCurve(const ClassifySpec& spec, int n,
                                        std::span<const int> m_grid) {
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "ErrorRatioCurve: n must be >= 1");
  const ClassVariances v = ClassVariancesFor(spec);
  const double baseline = ErrorFor(spec, v, n + 1.0);
  std::vector<RatioPoint> curve;
  curve.reserve(m_grid.size());
  for (int m : m_grid) {
    if (m < 1) throw Error(ErrorKind::kInvalidInput, "ErrorRatioCurve: m must be >= 1");
    const double eta = m == 1 ? baseline : ErrorFor(spec, v, static_cast<double>(n) + m);
    curve.push_back(RatioPoint{m, eta / baseline});
  }
  return curve;
}

}  // namespace oos_ase
