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

#include "oos_ase/oos.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

namespace oos_ase {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFractionToBoundary = 0.95;
constexpr double kArmijo = 1e-4;
constexpr double kMaxHessianCondition = 1e12;

void RequireMatchingLength(const Embedding& emb, const Vector& a) {
  if (a.size() != emb.positions.rows()) {
    std::ostringstream msg;
    msg << "edge vector has length " << a.size() << " but the embedding has "
        << emb.positions.rows() << " vertices";
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }
}

double LogLikelihood(const Matrix& positions, const Vector& a, const Vector& w) {
  const Vector p = positions * w;
  double value = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) > 0.0 && p(i) < 1.0)) return -kInf;
    if (a(i) != 0.0) value += a(i) * std::log(p(i));
    if (a(i) != 1.0) value += (1.0 - a(i)) * std::log1p(-p(i));
  }
  return value;
}

Vector Gradient(const Matrix& positions, const Vector& a, const Vector& w) {
  const Vector p = positions * w;
  const Vector coeff =
      (a - p).array() / (p.array() * (1.0 - p.array()));
  return positions.transpose() * coeff;
}

// Constraint c = 2i is X_i^T w >= eps, c = 2i + 1 is X_i^T w <= 1 - eps.
// Normals point into the box.
struct Constraints {
  const Matrix& positions;
  double eps;

  double Slack(int c, const Vector& w) const {
    const double p = positions.row(c / 2).dot(w);
    return c % 2 == 0 ? p - eps : 1.0 - eps - p;
  }
  Vector Normal(int c) const {
    Vector n = positions.row(c / 2).transpose();
    return c % 2 == 0 ? n : Vector(-n);
  }
  double NormalDot(int c, const Vector& s) const {
    const double v = positions.row(c / 2).dot(s);
    return c % 2 == 0 ? v : -v;
  }
};

// Orthonormal basis of {s : N^T s = 0}, N = normals of the working set.
Matrix NullSpace(const Constraints& cons, const std::vector<int>& working,
                 Eigen::Index d) {
  if (working.empty()) return Matrix::Identity(d, d);
  Matrix normals(d, static_cast<Eigen::Index>(working.size()));
  for (std::size_t k = 0; k < working.size(); ++k) {
    normals.col(static_cast<Eigen::Index>(k)) = cons.Normal(working[k]);
  }
  Eigen::HouseholderQR<Matrix> qr(normals);
  const Matrix q = qr.householderQ();
  return q.rightCols(d - normals.cols());
}

}  // namespace

std::string_view MethodName(OosMethod method) {
  return method == OosMethod::kLeastSquares ? "LS" : "ML";
}

OosMethod ParseMethod(std::string_view name) {
  if (name == "ls" || name == "LS") return OosMethod::kLeastSquares;
  if (name == "ml" || name == "ML") return OosMethod::kMaximumLikelihood;
  throw Error(ErrorKind::kConfig, "unknown OOS method '" + std::string(name) +
                                      "' (expected ls or ml)");
}

FeasibleBox::FeasibleBox(const Matrix& positions, double epsilon)
    : positions_(&positions), epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorKind::kInvalidInput, "epsilon must lie in (0, 1/2)");
  }
}

double FeasibleBox::Margin(const Vector& w) const {
  const Vector p = *positions_ * w;
  double margin = kInf;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    margin = std::min({margin, p(i) - epsilon_, 1.0 - epsilon_ - p(i)});
  }
  return margin;
}

int FeasibleBox::ActiveCount(const Vector& w, double tol) const {
  const Vector p = *positions_ * w;
  int count = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (std::abs(p(i) - epsilon_) <= tol) ++count;
    if (std::abs(1.0 - epsilon_ - p(i)) <= tol) ++count;
  }
  return count;
}

FeasibleBox::Center FeasibleBox::ChebyshevCenter(const Vector& start) const {
  const Matrix& x = *positions_;
  const Eigen::Index d = x.cols();
  const Constraints cons{x, epsilon_};
  const int m = constraint_count();

  Vector w = start;
  double t = Margin(w) - 1.0;

  // phi_mu(w, t) = t + mu * sum_c log(slack_c(w) - t)
  auto phi = [&](const Vector& ww, double tt, double mu) {
    double value = tt;
    for (int c = 0; c < m; ++c) {
      const double gap = cons.Slack(c, ww) - tt;
      if (!(gap > 0.0)) return -kInf;
      value += mu * std::log(gap);
    }
    return value;
  };

  for (double mu = 1.0 / m; m * mu > 1e-11; mu *= 0.1) {
    for (int iter = 0; iter < 100; ++iter) {
      Vector grad = Vector::Zero(d + 1);
      Matrix hess = Matrix::Zero(d + 1, d + 1);
      grad(d) = 1.0;
      Vector row(d + 1);
      for (int c = 0; c < m; ++c) {
        const double gap = cons.Slack(c, w) - t;
        row.head(d) = cons.Normal(c);
        row(d) = -1.0;
        grad += (mu / gap) * row;
        hess.selfadjointView<Eigen::Lower>().rankUpdate(row, -mu / (gap * gap));
      }
      hess = hess.selfadjointView<Eigen::Lower>();
      const Vector step = (-hess).ldlt().solve(grad);
      const double decrement = grad.dot(step);
      if (!(decrement > 1e-14 * (1.0 + std::abs(t)))) break;

      double alpha_max = kInf;
      for (int c = 0; c < m; ++c) {
        const double rate = cons.NormalDot(c, step.head(d)) - step(d);
        if (rate < 0.0) {
          alpha_max = std::min(alpha_max, (cons.Slack(c, w) - t) / -rate);
        }
      }
      double alpha = std::min(1.0, 0.99 * alpha_max);
      const double base = phi(w, t, mu);
      while (alpha > 1e-16 &&
             phi(w + alpha * step.head(d), t + alpha * step(d), mu) <
                 base + kArmijo * alpha * decrement) {
        alpha *= 0.5;
      }
      if (alpha <= 1e-16) break;
      w += alpha * step.head(d);
      t += alpha * step(d);
    }
  }
  return Center{w, Margin(w)};
}

LikelihoodValue Likelihood(const Matrix& positions, const Vector& a,
                           const Vector& w) {
  if (a.size() != positions.rows() || w.size() != positions.cols()) {
    throw Error(ErrorKind::kInvalidInput, "Likelihood: dimension mismatch");
  }
  const Vector p = positions * w;
  LikelihoodValue out;
  out.gradient = Vector::Zero(w.size());
  out.hessian = Matrix::Zero(w.size(), w.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p(i);
    if (!(pi > 0.0 && pi < 1.0)) {
      std::ostringstream msg;
      msg << "Likelihood: X_" << i << "^T w = " << pi << " is outside (0, 1)";
      throw Error(ErrorKind::kDomain, msg.str());
    }
    const double ai = a(i);
    if (ai != 0.0) out.value += ai * std::log(pi);
    if (ai != 1.0) out.value += (1.0 - ai) * std::log1p(-pi);
    const auto xi = positions.row(i).transpose();
    out.gradient += ((ai - pi) / (pi * (1.0 - pi))) * xi;
    const double curvature = ai / (pi * pi) + (1.0 - ai) / ((1.0 - pi) * (1.0 - pi));
    out.hessian.selfadjointView<Eigen::Lower>().rankUpdate(xi, -curvature);
  }
  out.hessian = out.hessian.selfadjointView<Eigen::Lower>();
  return out;
}

LikelihoodValue Likelihood(const Embedding& emb, const EdgeVector& a,
                           const Vector& w) {
  return Likelihood(emb.positions, a.AsVector(), w);
}

OosEstimate LlsOos(const Embedding& emb, const Vector& a) {
  RequireMatchingLength(emb, a);
  OosEstimate est;
  est.method = OosMethod::kLeastSquares;
  est.w = (emb.eig.vectors.transpose() * a).cwiseQuotient(emb.eig.values.cwiseSqrt());
  est.diagnostics.gradient_norm =
      (emb.positions.transpose() * (emb.positions * est.w - a)).norm();
  return est;
}

OosEstimate LlsOos(const Embedding& emb, const EdgeVector& a) {
  return LlsOos(emb, a.AsVector());
}

OosEstimate MlOos(const Embedding& emb, const Vector& a, const MlOptions& opts) {
  RequireMatchingLength(emb, a);
  const Matrix& x = emb.positions;
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const FeasibleBox box(x, opts.epsilon);
  const Constraints cons{x, opts.epsilon};
  const int m = box.constraint_count();
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-8 * static_cast<double>(n);

  OosDiagnostics diag;
  const Vector w_ls = LlsOos(emb, a).w;
  Vector w = w_ls;
  diag.initializer = "ls";
  if (!box.Contains(w, 0.0)) {
    const FeasibleBox::Center center = box.ChebyshevCenter(w_ls);
    if (center.margin < 0.0) {
      std::ostringstream msg;
      msg << "feasible set is empty for epsilon = " << opts.epsilon
          << " (best achievable margin " << center.margin << ")";
      diag.initializer = "chebyshev";
      throw SolverError(ErrorKind::kInfeasible, msg.str(), center.w, diag);
    }
    // Smallest step from the LS point toward the center that is feasible.
    double theta = 0.0;
    for (int c = 0; c < m; ++c) {
      const double s0 = cons.Slack(c, w_ls);
      if (s0 < 0.0) {
        const double s1 = cons.Slack(c, center.w);
        theta = std::max(theta, -s0 / (s1 - s0));
      }
    }
    theta = std::min(theta, 1.0);
    w = w_ls + theta * (center.w - w_ls);
    if (!box.Contains(w, 0.0)) w = center.w;
    diag.initializer = "chebyshev";
  }

  std::vector<int> working;
  std::vector<char> in_working(static_cast<std::size_t>(m), 0);
  double f = LogLikelihood(x, a, w);
  bool converged = false;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    diag.iterations = iter;
    const LikelihoodValue ev = Likelihood(x, a, w);
    f = ev.value;

    Eigen::SelfAdjointEigenSolver<Matrix> curvature(ev.hessian, Eigen::EigenvaluesOnly);
    const double h_scale = std::max(1.0, curvature.eigenvalues().cwiseAbs().maxCoeff());
    if (curvature.eigenvalues().maxCoeff() > 1e-8 * h_scale) {
      throw SolverError(ErrorKind::kNonConvergence,
                        "log-likelihood Hessian is not negative semidefinite", w, diag);
    }

    const Matrix z = NullSpace(cons, working, d);
    const Vector pg = z.transpose() * ev.gradient;
    diag.gradient_norm = pg.norm();

    if (diag.gradient_norm <= tol) {
      if (working.empty()) {
        converged = true;
        break;
      }
      Matrix normals(d, static_cast<Eigen::Index>(working.size()));
      for (std::size_t k = 0; k < working.size(); ++k) {
        normals.col(static_cast<Eigen::Index>(k)) = cons.Normal(working[k]);
      }
      // KKT for a maximum: gradient + N mu = 0 with mu >= 0.
      const Vector mu = normals.colPivHouseholderQr().solve(-ev.gradient);
      Eigen::Index worst = 0;
      const double min_mu = mu.minCoeff(&worst);
      if (min_mu >= -tol) {
        converged = true;
        break;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(worst)])] = 0;
      working.erase(working.begin() + worst);
      continue;
    }

    Vector step;
    const Matrix reduced = -(z.transpose() * ev.hessian * z);
    Eigen::SelfAdjointEigenSolver<Matrix> reduced_eig(reduced, Eigen::EigenvaluesOnly);
    const double lo = reduced_eig.eigenvalues().minCoeff();
    const double hi = reduced_eig.eigenvalues().maxCoeff();
    if (lo > 0.0 && hi / lo <= kMaxHessianCondition) {
      step = z * reduced.ldlt().solve(pg);
    } else {
      step = z * pg;
    }
    const double slope = ev.gradient.dot(step);

    double alpha_max = kInf;
    int blocking = -1;
    for (int c = 0; c < m; ++c) {
      if (in_working[static_cast<std::size_t>(c)]) continue;
      const double rate = cons.NormalDot(c, step);
      if (rate < 0.0) {
        const double alpha = std::max(0.0, cons.Slack(c, w)) / -rate;
        if (alpha < alpha_max) {
          alpha_max = alpha;
          blocking = c;
        }
      }
    }

    if (alpha_max < 1.0) {
      const Vector w_bound = w + alpha_max * step;
      if (Gradient(x, a, w_bound).dot(step) > 0.0) {
        // The ascent continues past the bound: stop on it and hold it active.
        w = w_bound;
        working.push_back(blocking);
        in_working[static_cast<std::size_t>(blocking)] = 1;
        f = LogLikelihood(x, a, w);
        continue;
      }
    }

    double alpha = std::min(1.0, kFractionToBoundary * alpha_max);
    while (alpha > 1e-16 &&
           LogLikelihood(x, a, w + alpha * step) < f + kArmijo * alpha * slope) {
      alpha *= 0.5;
    }
    if (alpha <= 1e-16) {
      std::ostringstream msg;
      msg << "line search stalled with projected gradient norm "
          << diag.gradient_norm << " > tol " << tol;
      throw SolverError(ErrorKind::kNonConvergence, msg.str(), w, diag);
    }
    w += alpha * step;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "no convergence within " << opts.max_iter << " iterations";
    throw SolverError(ErrorKind::kNonConvergence, msg.str(), w, diag);
  }

  OosEstimate est;
  est.method = OosMethod::kMaximumLikelihood;
  est.w = w;
  diag.active_constraints = static_cast<int>(working.size());
  diag.objective = LogLikelihood(x, a, w);
  est.diagnostics = diag;
  return est;
}

OosEstimate MlOos(const Embedding& emb, const EdgeVector& a, const MlOptions& opts) {
  return MlOos(emb, a.AsVector(), opts);
}

}  // namespace oos_ase
