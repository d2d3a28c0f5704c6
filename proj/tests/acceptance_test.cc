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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>

#include "oos_ase/align.h"
#include "oos_ase/clt_theory.h"
#include "oos_ase/embed.h"
#include "oos_ase/error.h"
#include "oos_ase/experiments.h"
#include "oos_ase/io.h"
#include "oos_ase/oos.h"
#include "test_util.h"

namespace oos_ase {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

ExperimentConfig MixtureConfig(Study study, std::vector<int> n_grid, int trials) {
  ExperimentConfig cfg;
  cfg.study = study;
  cfg.dist = testing::Mixture();
  cfg.n_grid = std::move(n_grid);
  cfg.trials = trials;
  cfg.d = 2;
  cfg.master_seed = kSeed;
  return cfg;
}

const GroupSummary& Group(const StudyResult& r, OosMethod method) {
  for (const GroupSummary& g : r.groups) {
    if (g.method == method) return g;
  }
  throw Error(ErrorKind::kInvalidInput, "missing group");
}

Outcome Criterion1() {
  const auto start = Clock::now();
  const StudyResult r = RunStudy(MixtureConfig(Study::kCltLs, {500}, 100));
  const double secs = Seconds(start);
  const GroupSummary& g = Group(r, OosMethod::kLeastSquares);
  const bool pass = g.coverage95 >= 0.85 && g.coverage95 <= 1.0 && g.coverage68 >= 0.55 &&
                    g.coverage68 <= 0.80 && secs < 120.0 && g.failures == 0;
  return {pass, Fmt("LS coverage95=%.2f coverage68=%.2f time=%.1fs", g.coverage95,
                    g.coverage68, secs)};
}

Outcome Criterion2() {
  const StudyResult r = RunStudy(MixtureConfig(Study::kCltMl, {500}, 100));
  const GroupSummary& g = Group(r, OosMethod::kMaximumLikelihood);
  const double agree = g.ls_agreement.value_or(0.0);
  const bool pass =
      g.coverage95 >= 0.85 && g.coverage95 <= 1.0 && agree >= 0.90 && g.failures == 0;
  return {pass, Fmt("ML coverage95=%.2f ||ML-LS||<=0.1 in %.0f/100 trials (failures %.0f)",
                    g.coverage95, 100.0 * agree, g.failures)};
}

Outcome Criterion3() {
  const auto start = Clock::now();
  const StudyResult r =
      RunStudy(MixtureConfig(Study::kRateSweep, {100, 200, 400, 800, 1600}, 50));
  const double secs = Seconds(start);
  bool pass = secs < 600.0 && r.fits.size() == 2;
  std::string detail;
  for (const RateFit& fit : r.fits) {
    pass = pass && fit.slope >= -0.65 && fit.slope <= -0.35;
    detail += std::string(MethodName(fit.method)) + Fmt(" slope=%.3f ", fit.slope);
  }
  return {pass, detail + Fmt("time=%.1fs", secs)};
}

// Latent positions with non-negative coordinates and norm at most 0.95, so
// every inner product is a valid probability.
Matrix RandomLatents(std::mt19937_64& gen, int n, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = u(gen);
    x.row(i) *= (0.3 + 0.65 * u(gen)) / x.row(i).norm();
  }
  return x;
}

Outcome Criterion4() {
  std::mt19937_64 gen(kSeed);
  std::uniform_int_distribution<int> n_dist(40, 300);
  std::uniform_int_distribution<int> d_dist(1, 3);
  double worst_qr = 0.0;
  double worst_cg = 0.0;
  int instances = 0;
  for (std::uint64_t t = 0; instances < 1000; ++t) {
    const int n = n_dist(gen);
    const int d = d_dist(gen);
    LatentMatrix x;
    x.rows = RandomLatents(gen, n + 1, d);
    Embedding emb;
    try {
      emb = Ase(SampleAdjacency(x, RngSeed{kSeed, 2 * t}), d);
    } catch (const Error&) {
      continue;  // a draw whose top-d spectrum is not positive
    }
    ++instances;
    const Vector a = SampleOosEdges(x, x.rows.row(0).transpose(), RngSeed{kSeed, 2 * t + 1})
                         .AsVector();
    const Vector closed = LlsOos(emb, a).w;
    worst_qr = std::max(worst_qr, (closed - Lstsq(emb.positions, a)).norm());
    Eigen::LeastSquaresConjugateGradient<Matrix> cg;
    cg.setTolerance(1e-15);
    cg.setMaxIterations(100);
    cg.compute(emb.positions);
    worst_cg = std::max(worst_cg, (closed - Vector(cg.solve(a))).norm());
  }
  const bool pass = worst_qr <= 1e-10 && worst_cg <= 1e-10;
  return {pass, Fmt("1000 instances, max |closed - QR| = %.2e, max |closed - CG| = %.2e",
                    worst_qr, worst_cg)};
}

Outcome Criterion5() {
  ExperimentConfig cfg = MixtureConfig(Study::kCltLs, {1000}, 2000);
  cfg.wbar_mode = WbarMode::kFixedAtom;
  cfg.fixed_atom = 0;
  cfg.alignment = Alignment::kCltRotation;
  const auto start = Clock::now();
  const StudyResult r = RunStudy(cfg);
  const GroupSummary& g = Group(r, OosMethod::kLeastSquares);
  const Matrix theory = SigmaClt(testing::Mixture(), testing::MixtureX1());
  const Matrix rel =
      ((g.scaled_covariance - theory).array() / theory.array().abs()).abs().matrix();
  std::ostringstream detail;
  detail << Fmt("max relative error %.3f; empirical [%.4f %.4f; ", rel.maxCoeff(),
                g.scaled_covariance(0, 0), g.scaled_covariance(0, 1))
         << Fmt("%.4f %.4f] vs theory ", g.scaled_covariance(1, 0), g.scaled_covariance(1, 1))
         << Fmt("[%.4f %.4f; %.4f %.4f]", theory(0, 0), theory(0, 1), theory(1, 0),
                theory(1, 1))
         << Fmt(" time=%.1fs", Seconds(start));
  return {rel.maxCoeff() <= 0.25 && g.failures == 0, detail.str()};
}

Outcome Criterion6() {
  const ClassifySpec spec{0.4, 0.6, 0.61};
  int violations = 0;
  double worst = 0.0;
  for (int n : {100, 1000, 10000}) {
    const double base = ClassifyError(spec, n + 1.0);
    for (int m = 2; m <= 10000; ++m) {
      const double eta = ClassifyError(spec, static_cast<double>(n) + m);
      if (!(eta < base)) ++violations;
      worst = std::max(worst, eta / base);
    }
  }
  return {violations == 0,
          Fmt("%.0f violations over 3 x 9999 pairs; max eta ratio %.8f", violations, worst)};
}

Outcome Criterion7() {
  const ClassifySpec spec{0.4, 0.6, 0.61};
  std::vector<int> grid(10000);
  for (int m = 1; m <= 10000; ++m) grid[static_cast<std::size_t>(m - 1)] = m;
  bool pass = true;
  std::string detail;
  for (int n : {100, 1000, 10000}) {
    const std::vector<RatioPoint> curve = ErrorRatioCurve(spec, n, grid);
    pass = pass && curve.front().ratio == 1.0;
    double at100 = 1.0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
      pass = pass && curve[k].ratio <= curve[k - 1].ratio;
      if (curve[k].m <= 100) {
        at100 = curve[k].ratio;
        if (n >= 1000) pass = pass && curve[k].ratio >= 0.9;
      }
    }
    detail += "n=" + std::to_string(n) +
              Fmt(": r(100)=%.5f r(10^4)=%.4f; ", at100, curve.back().ratio);
  }
  return {pass, detail};
}

// Noiseless recovery, likelihood derivatives and randomized invariants.
Outcome Criterion8() {
  std::mt19937_64 gen(kSeed + 8);
  // Noiseless path through the experiment runner.
  double noiseless = 0.0;
  for (Alignment alignment : {Alignment::kProcrustes, Alignment::kCltRotation}) {
    ExperimentConfig cfg = MixtureConfig(Study::kRateSweep, {100, 200, 400, 800}, 5);
    cfg.noiseless = true;
    cfg.alignment = alignment;
    for (const TrialRecord& rec : RunStudy(cfg).records) {
      noiseless = std::max(noiseless, rec.ok ? rec.aligned_error : 1.0);
    }
  }
  // Latent recovery from P.
  double latent = 0.0;
  for (int t = 0; t < 20; ++t) {
    const LatentMatrix x = testing::SampleMixture(200 + 40 * t, kSeed, 100 + t);
    const Embedding emb =
        EmbedSymmetric(SymMatrix::FromUpper(x.rows * x.rows.transpose()), 2);
    latent = std::max(latent, Procrustes(emb.positions, x.rows).residual /
                                  std::sqrt(static_cast<double>(x.rows.rows())));
  }

  // Finite differences of the log-likelihood.
  double grad_rel = 0.0;
  double hess_rel = 0.0;
  for (int t = 0; t < 50; ++t) {
    const LatentMatrix x = testing::SampleMixture(300, kSeed, 200 + t);
    const Embedding emb = Ase(SampleAdjacency(x, RngSeed{kSeed, 300u + t}), 2);
    const Vector a =
        SampleOosEdges(x, testing::MixtureX2(), RngSeed{kSeed, 400u + t}).AsVector();
    const FeasibleBox box(emb.positions, 0.05);
    const Vector w = box.ChebyshevCenter(LlsOos(emb, a).w).w;
    const LikelihoodValue v = Likelihood(emb.positions, a, w);
    const double h = 1e-6;
    Vector fd_grad(2);
    Matrix fd_hess(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector e = Vector::Zero(2);
      e(j) = h;
      const LikelihoodValue up = Likelihood(emb.positions, a, w + e);
      const LikelihoodValue down = Likelihood(emb.positions, a, w - e);
      fd_grad(j) = (up.value - down.value) / (2 * h);
      fd_hess.col(j) = (up.gradient - down.gradient) / (2 * h);
    }
    grad_rel = std::max(grad_rel, (fd_grad - v.gradient).norm() /
                                      std::max(1.0, v.gradient.norm()));
    hess_rel = std::max(hess_rel, (fd_hess - v.hessian).norm() /
                                      std::max(1.0, v.hessian.norm()));
  }

  // Randomized invariants.
  int broken = 0;
  std::uniform_int_distribution<int> n_dist(5, 60);
  std::uniform_int_distribution<int> d_dist(1, 4);
  for (int c = 0; c < 500; ++c) {
    const int n = n_dist(gen);
    const int d = std::min(d_dist(gen), n);
    const Matrix raw = testing::RandomMatrix(gen, n, n);
    const SymMatrix m = SymMatrix::FromUpper(raw);
    const double scale = std::max(1.0, m.dense().norm());
    // Eigenpairs: residual, orthonormality and ordering.
    const EigenPairs eig = TopEigs(m, d);
    const double residual =
        (m.dense() * eig.vectors - eig.vectors * eig.values.asDiagonal()).norm();
    const double ortho =
        (eig.vectors.transpose() * eig.vectors - Matrix::Identity(d, d)).norm();
    bool ok = residual <= 1e-9 * scale && ortho <= 1e-10;
    for (int k = 1; k < d; ++k) ok = ok && eig.values(k - 1) >= eig.values(k);
    // Embedding: X = U S^{1/2} reproduces the best rank-d fit of a PSD matrix.
    const Matrix latents = RandomLatents(gen, n, d);
    const Embedding emb =
        EmbedSymmetric(SymMatrix::FromUpper(latents * latents.transpose()), d);
    ok = ok && (emb.positions * emb.positions.transpose() - latents * latents.transpose())
                       .norm() <= 1e-9;
    ok = ok && (emb.positions - emb.eig.vectors * emb.eig.values.cwiseSqrt().asDiagonal())
                       .norm() <= 1e-12 * std::max(1.0, emb.positions.norm());
    // Procrustes: orthogonal, recovers a planted rotation.
    const Matrix rot = testing::RandomOrthogonal(gen, d);
    const Matrix source = testing::RandomMatrix(gen, n, d);
    const ProcrustesResult pr = Procrustes(source, source * rot);
    ok = ok && (pr.rotation.transpose() * pr.rotation - Matrix::Identity(d, d)).norm() <= 1e-12;
    ok = ok && (pr.rotation - rot).norm() <= 1e-8 && pr.residual <= 1e-9;
    if (!ok) ++broken;
  }

  const bool pass = noiseless <= 1e-8 && latent <= 1e-8 && grad_rel <= 1e-5 &&
                    hess_rel <= 1e-4 && broken == 0;
  return {pass, Fmt("noiseless w err %.1e, latent rms %.1e, fd grad %.1e, fd hess %.1e",
                    noiseless, latent, grad_rel, hess_rel) +
                    Fmt(", %.0f/500 property cases broken", broken)};
}

std::map<std::string, std::string> DirectoryContents(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), dir).string()] = io::ReadFile(entry.path());
    }
  }
  return files;
}

Outcome Criterion9() {
  const fs::path root = fs::temp_directory_path() / "oos_ase_acceptance_determinism";
  fs::remove_all(root);
  std::vector<ExperimentConfig> configs = {
      MixtureConfig(Study::kCltLs, {300}, 30),
      MixtureConfig(Study::kCltMl, {200, 400}, 20),
      MixtureConfig(Study::kRateSweep, {100, 200, 400, 800}, 8),
  };
  ExperimentConfig ratio;
  ratio.study = Study::kErrorRatio;
  ratio.classify = ClassifySpec{0.4, 0.6, 0.61};
  ratio.n_grid = {100, 1000, 10000};
  ratio.m_grid = {1, 2, 10, 100, 1000, 10000};
  configs.push_back(ratio);
  int identical = 0;
  int files = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int workers : {1, 2, 4}) {
      ExperimentConfig cfg = configs[k];
      cfg.workers = workers;
      const fs::path dir = root / (std::to_string(k) + "_w" + std::to_string(workers));
      io::WriteStudyOutputs(dir, RunStudy(cfg));
      runs.push_back(DirectoryContents(dir));
    }
    files += static_cast<int>(runs[0].size());
    if (runs[0] == runs[1] && runs[0] == runs[2] && !runs[0].empty()) ++identical;
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(configs.size()),
          Fmt("%.0f/%.0f studies byte-identical across 1, 2, 4 workers (%.0f files each)",
              identical, static_cast<double>(configs.size()), files)};
}

}  // namespace
}  // namespace oos_ase

int main() {
  using oos_ase::Outcome;
  const std::vector<std::function<Outcome()>> criteria = {
      oos_ase::Criterion1, oos_ase::Criterion2, oos_ase::Criterion3,
      oos_ase::Criterion4, oos_ase::Criterion5, oos_ase::Criterion6,
      oos_ase::Criterion7, oos_ase::Criterion8, oos_ase::Criterion9,
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome outcome{false, ""};
    try {
      outcome = criteria[k]();
    } catch (const std::exception& e) {
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failed;
    std::printf("%s criterion %zu: %s\n", outcome.pass ? "PASS" : "FAIL", k + 1,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
