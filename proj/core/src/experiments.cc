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

#include "oos_ase/experiments.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "oos_ase/align.h"
#include "oos_ase/embed.h"
#include "oos_ase/error.h"
#include "oos_ase/rng.h"

namespace oos_ase {
namespace {

constexpr double kChi2Level68 = 0.68;
constexpr double kChi2Level95 = 0.95;

const std::vector<int>& DefaultMGrid() {
  static const std::vector<int> grid = {1,   2,   3,    5,    10,   20,   30,   50,  100,
                                        200, 300, 500,  1000, 2000, 3000, 5000, 10000};
  return grid;
}

bool IsSimulation(Study s) { return s != Study::kErrorRatio; }

// Runs task(i) for i in [0, count) on up to `workers` threads. Results must
// be written to per-index slots by the task itself.
template <typename Task>
void ParallelFor(std::size_t count, int workers, Task task) {
  const std::size_t threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Matrix SampleCovariance(const std::vector<Vector>& xs) {
  const Eigen::Index d = xs.front().size();
  Vector mean = Vector::Zero(d);
  for (const Vector& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  Matrix cov = Matrix::Zero(d, d);
  if (xs.size() < 2) return cov;
  for (const Vector& x : xs) cov += (x - mean) * (x - mean).transpose();
  return cov / static_cast<double>(xs.size() - 1);
}

StudyResult RunSimulation(const ExperimentConfig& cfg) {
  cfg.Validate();
  const std::size_t per_n = static_cast<std::size_t>(cfg.trials);
  const std::size_t tasks = cfg.n_grid.size() * per_n;
  std::vector<std::vector<TrialRecord>> slots(tasks);
  ParallelFor(tasks, cfg.workers, [&](std::size_t i) {
    slots[i] = RunTrial(cfg, static_cast<int>(i / per_n), static_cast<int>(i % per_n));
  });
  StudyResult result;
  result.config = cfg;
  for (auto& slot : slots) {
    for (auto& rec : slot) result.records.push_back(std::move(rec));
  }
  Summarize(result);
  return result;
}

}  // namespace

std::string_view StudyName(Study study) {
  switch (study) {
    case Study::kCltLs: return "clt-ls";
    case Study::kCltMl: return "clt-ml";
    case Study::kRateSweep: return "rate";
    case Study::kErrorRatio: return "ratio";
  }
  return "unknown";
}

Study ParseStudy(std::string_view name) {
  if (name == "clt-ls" || name == "clt_ls") return Study::kCltLs;
  if (name == "clt-ml" || name == "clt_ml") return Study::kCltMl;
  if (name == "rate" || name == "rate_sweep") return Study::kRateSweep;
  if (name == "ratio" || name == "error_ratio") return Study::kErrorRatio;
  throw Error(ErrorKind::kConfig, "unknown study '" + std::string(name) +
                                      "' (expected clt-ls, clt-ml, rate or ratio)");
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  if (n_grid.empty()) fail("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) fail("n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) fail("n_grid must be strictly increasing");
  }
  if (n_grid.size() > 0xFFFF) fail("n_grid is too long");
  if (workers < 1) fail("workers must be >= 1");
  if (study == Study::kErrorRatio) {
    if (!classify) fail("ratio study needs a classify spec");
    classify->Validate();
    for (int m : m_grid) {
      if (m < 1) fail("m_grid entries must be >= 1");
    }
    return;
  }
  if (trials < 1) fail("trials must be >= 1");
  if (!dist) fail("simulation studies need a latent distribution");
  if (d != dist->dimension()) fail("d must equal the distribution's dimension");
  if (!(epsilon > 0.0 && epsilon < 0.5)) fail("epsilon must lie in (0, 1/2)");
  if (wbar_mode == WbarMode::kFixedAtom &&
      (fixed_atom < 0 || fixed_atom >= static_cast<int>(dist->atoms().size()))) {
    fail("fixed_atom is out of range");
  }
  if (study == Study::kRateSweep && n_grid.size() < 4) {
    fail("rate sweep needs at least 4 n_grid points");
  }
  if (n_grid.front() < d) fail("n must be at least d");
}

std::vector<OosMethod> ExperimentConfig::Methods() const {
  switch (study) {
    case Study::kCltLs: return {OosMethod::kLeastSquares};
    case Study::kCltMl:
    case Study::kRateSweep:
      return {OosMethod::kLeastSquares, OosMethod::kMaximumLikelihood};
    case Study::kErrorRatio: return {};
  }
  return {};
}

std::vector<TrialRecord> RunTrial(const ExperimentConfig& cfg, int n_index, int trial) {
  const int n = cfg.n_grid.at(static_cast<std::size_t>(n_index));
  const auto group = static_cast<std::uint32_t>(n_index);
  const auto t = static_cast<std::uint64_t>(trial);
  const RngSeed latent_seed{cfg.master_seed, DeriveStream(t, group, StreamPurpose::kLatents)};
  const RngSeed graph_seed{cfg.master_seed, DeriveStream(t, group, StreamPurpose::kAdjacency)};
  const RngSeed edge_seed{cfg.master_seed, DeriveStream(t, group, StreamPurpose::kOosEdges)};

  LatentMatrix all = SampleLatents(*cfg.dist, n + 1, latent_seed);
  int atom = all.atom_index.back();
  if (cfg.wbar_mode == WbarMode::kFixedAtom) {
    atom = cfg.fixed_atom;
    all.rows.row(n) = cfg.dist->atoms()[static_cast<std::size_t>(atom)].point.transpose();
  }
  const Vector wbar = all.rows.row(n).transpose();
  LatentMatrix in_sample{all.rows.topRows(n), {}, all.seed};
  in_sample.atom_index.assign(all.atom_index.begin(), all.atom_index.begin() + n);

  std::vector<TrialRecord> out;
  const std::vector<OosMethod> methods = cfg.Methods();
  for (OosMethod method : methods) {
    TrialRecord rec;
    rec.trial = trial;
    rec.n = n;
    rec.atom = atom;
    rec.method = method;
    rec.wbar = wbar;
    out.push_back(std::move(rec));
  }
  auto fail_all = [&](const std::string& msg) {
    for (auto& rec : out) {
      rec.ok = false;
      rec.error = msg;
    }
    return out;
  };

  Embedding emb;
  Vector a;
  Matrix rotation;
  try {
    if (cfg.noiseless) {
      emb = EmbedSymmetric(
          SymMatrix::FromUpper(in_sample.rows * in_sample.rows.transpose()), cfg.d);
      a = in_sample.rows * wbar;
    } else {
      const AdjacencyMatrix adj = SampleAdjacency(in_sample, graph_seed);
      a = SampleOosEdges(in_sample, wbar, edge_seed).AsVector();
      emb = Ase(adj, cfg.d);
    }
    if (cfg.alignment == Alignment::kProcrustes) {
      rotation = Procrustes(emb.positions, in_sample.rows).rotation;
    } else {
      const EigenPairs u_p = TopEigsOfGram(in_sample.rows, cfg.d);
      const Matrix v_n = CltRotation(emb, u_p);
      const Matrix x_p = u_p.vectors * u_p.values.cwiseSqrt().asDiagonal();
      const Matrix w = Procrustes(in_sample.rows, x_p).rotation;
      rotation = v_n * w.transpose();
    }
  } catch (const Error& e) {
    return fail_all(e.what());
  }

  for (auto& rec : out) {
    const auto start = std::chrono::steady_clock::now();
    try {
      OosEstimate est;
      if (rec.method == OosMethod::kLeastSquares) {
        est = LlsOos(emb, a);
      } else {
        MlOptions opts;
        opts.epsilon = cfg.epsilon;
        est = MlOos(emb, a, opts);
      }
      rec.estimate = est.w;
      rec.rotation = rotation;
      rec.aligned = AlignEstimate(est.w, rotation);
      rec.aligned_error = (rec.aligned - wbar).norm();
    } catch (const Error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidInput, "Median of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

void Summarize(StudyResult& result) {
  result.groups.clear();
  result.fits.clear();
  const ExperimentConfig& cfg = result.config;
  if (!IsSimulation(cfg.study)) return;

  const double q68 = ChiSquare2Quantile(kChi2Level68);
  const double q95 = ChiSquare2Quantile(kChi2Level95);
  const auto& atoms = cfg.dist->atoms();

  for (int n : cfg.n_grid) {
    for (OosMethod method : cfg.Methods()) {
      GroupSummary g;
      g.n = n;
      g.method = method;
      std::vector<double> errors;
      std::vector<Vector> scaled;
      std::map<int, std::vector<Vector>> by_atom;
      int in68 = 0;
      int in95 = 0;
      std::map<int, std::pair<int, int>> atom_hits;
      for (const TrialRecord& rec : result.records) {
        if (rec.n != n || rec.method != method) continue;
        ++g.trials;
        if (!rec.ok) {
          ++g.failures;
          continue;
        }
        errors.push_back(rec.aligned_error);
        scaled.push_back(std::sqrt(static_cast<double>(n)) * (rec.aligned - rec.wbar));
        by_atom[rec.atom].push_back(rec.aligned);
        const AsymptoticNormal limit = OosLimitingNormal(*cfg.dist, rec.wbar, n);
        const double m2 = limit.Mahalanobis2(rec.aligned);
        const bool hit68 = m2 <= q68;
        const bool hit95 = m2 <= q95;
        in68 += hit68;
        in95 += hit95;
        atom_hits[rec.atom].first += hit68;
        atom_hits[rec.atom].second += hit95;
      }
      const int ok = g.trials - g.failures;
      if (ok > 0) {
        g.median_error = Median(errors);
        g.coverage68 = static_cast<double>(in68) / ok;
        g.coverage95 = static_cast<double>(in95) / ok;
        g.scaled_covariance = SampleCovariance(scaled);
      }
      for (const auto& [atom, points] : by_atom) {
        AtomSummary s;
        s.atom = atom;
        s.count = static_cast<int>(points.size());
        s.mean = Vector::Zero(cfg.d);
        for (const Vector& p : points) s.mean += p;
        s.mean /= static_cast<double>(points.size());
        s.covariance = SampleCovariance(points);
        s.theoretical_covariance =
            SigmaClt(*cfg.dist, atoms[static_cast<std::size_t>(atom)].point) / n;
        s.coverage68 = static_cast<double>(atom_hits[atom].first) / s.count;
        s.coverage95 = static_cast<double>(atom_hits[atom].second) / s.count;
        g.atoms.push_back(std::move(s));
      }
      if (method == OosMethod::kMaximumLikelihood) {
        std::map<int, Vector> ls_by_trial;
        for (const TrialRecord& rec : result.records) {
          if (rec.n == n && rec.method == OosMethod::kLeastSquares && rec.ok) {
            ls_by_trial[rec.trial] = rec.estimate;
          }
        }
        if (!ls_by_trial.empty()) {
          int close = 0;
          for (const TrialRecord& rec : result.records) {
            if (rec.n != n || rec.method != method) continue;
            const auto it = ls_by_trial.find(rec.trial);
            if (rec.ok && it != ls_by_trial.end() &&
                (rec.estimate - it->second).norm() <= kMlLsAgreementRadius) {
              ++close;
            }
          }
          g.ls_agreement = static_cast<double>(close) / g.trials;
        }
      }
      result.groups.push_back(std::move(g));
    }
  }

  if (cfg.study == Study::kRateSweep) {
    for (OosMethod method : cfg.Methods()) {
      std::vector<double> xs, ys;
      for (const GroupSummary& g : result.groups) {
        if (g.method != method || g.trials == g.failures || !(g.median_error > 0.0)) {
          continue;
        }
        xs.push_back(std::log(static_cast<double>(g.n)));
        ys.push_back(std::log(g.median_error));
      }
      if (xs.size() < 2) continue;
      const double k = static_cast<double>(xs.size());
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
      }
      mx /= k;
      my /= k;
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      RateFit fit;
      fit.method = method;
      fit.slope = sxy / sxx;
      fit.intercept = my - fit.slope * mx;
      result.fits.push_back(fit);
    }
  }
}

StudyResult RunCltStudy(const ExperimentConfig& cfg) {
  if (cfg.study != Study::kCltLs && cfg.study != Study::kCltMl) {
    throw Error(ErrorKind::kConfig, "RunCltStudy needs study clt-ls or clt-ml");
  }
  return RunSimulation(cfg);
}

StudyResult RunRateSweep(const ExperimentConfig& cfg) {
  if (cfg.study != Study::kRateSweep) {
    throw Error(ErrorKind::kConfig, "RunRateSweep needs study rate");
  }
  return RunSimulation(cfg);
}

StudyResult RunErrorRatio(const ExperimentConfig& cfg) {
  if (cfg.study != Study::kErrorRatio) {
    throw Error(ErrorKind::kConfig, "RunErrorRatio needs study ratio");
  }
  cfg.Validate();
  StudyResult result;
  result.config = cfg;
  if (result.config.m_grid.empty()) result.config.m_grid = DefaultMGrid();
  for (int n : cfg.n_grid) {
    result.curves.push_back(
        RatioCurve{n, ErrorRatioCurve(*cfg.classify, n, result.config.m_grid)});
  }
  return result;
}

StudyResult RunStudy(const ExperimentConfig& cfg) {
  switch (cfg.study) {
    case Study::kCltLs:
    case Study::kCltMl: return RunCltStudy(cfg);
    case Study::kRateSweep: return RunRateSweep(cfg);
    case Study::kErrorRatio: return RunErrorRatio(cfg);
  }
  throw Error(ErrorKind::kConfig, "unknown study");
}

}  // namespace oos_ase
