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

#ifndef OOS_ASE_EXPERIMENTS_H_
#define OOS_ASE_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oos_ase/clt_theory.h"
#include "oos_ase/linalg.h"
#include "oos_ase/oos.h"
#include "oos_ase/rdpg.h"

namespace oos_ase {

enum class Study { kCltLs, kCltMl, kRateSweep, kErrorRatio };

// "clt-ls", "clt-ml", "rate", "ratio".
std::string_view StudyName(Study study);
Study ParseStudy(std::string_view name);

// Where the out-of-sample vertex's latent position comes from.
enum class WbarMode { kDrawFromF, kFixedAtom };

// How estimates are rotated into the frame of the true latent positions.
//   kProcrustes: Procrustes of the in-sample embedding onto X.
//   kCltRotation: V_n from U_A^T U_P, composed with the exact rotation taking
//     X onto U_P S_P^{1/2}.
enum class Alignment { kProcrustes, kCltRotation };

struct ExperimentConfig {
  Study study = Study::kCltLs;
  std::optional<LatentDistribution> dist;  // simulation studies
  std::optional<ClassifySpec> classify;    // error-ratio study
  std::vector<int> n_grid;
  std::vector<int> m_grid;                 // error-ratio study
  int trials = 100;
  int d = 2;
  double epsilon = 0.05;
  std::uint64_t master_seed = 0;
  int workers = 1;
  WbarMode wbar_mode = WbarMode::kDrawFromF;
  int fixed_atom = 0;
  // Replace A by P = X X^T and the edge vector by X wbar.
  bool noiseless = false;
  Alignment alignment = Alignment::kProcrustes;

  // Throws kConfig on an inconsistent configuration.
  void Validate() const;
  // Methods estimated per trial (clt-ml also records LS for comparison).
  std::vector<OosMethod> Methods() const;
};

struct TrialRecord {
  int trial = 0;
  int n = 0;
  int atom = 0;
  OosMethod method = OosMethod::kLeastSquares;
  Vector wbar;
  Vector estimate;   // raw, in the embedding's frame
  Matrix rotation;   // estimate -> truth frame is rotation^T * estimate
  Vector aligned;
  double aligned_error = 0.0;
  double wall_time = 0.0;  // seconds in the OOS solve; not persisted
  bool ok = true;
  std::string error;
};

struct AtomSummary {
  int atom = 0;
  int count = 0;
  Vector mean;
  Matrix covariance;              // sample covariance of aligned estimates
  Matrix theoretical_covariance;  // Sigma_atom / n
  double coverage68 = 0.0;
  double coverage95 = 0.0;
};

// One (n, method) cell of a study.
struct GroupSummary {
  int n = 0;
  OosMethod method = OosMethod::kLeastSquares;
  int trials = 0;
  int failures = 0;
  double median_error = 0.0;
  double coverage68 = 0.0;
  double coverage95 = 0.0;
  std::vector<AtomSummary> atoms;
  // Sample covariance of sqrt(n)(aligned - wbar) over all successful trials.
  Matrix scaled_covariance;
  // Fraction of trials with ||w_ML - w_LS|| <= 0.1 (ML groups that also have
  // LS records).
  std::optional<double> ls_agreement;
};

struct RateFit {
  OosMethod method = OosMethod::kLeastSquares;
  double slope = 0.0;
  double intercept = 0.0;
};

struct RatioCurve {
  int n = 0;
  std::vector<RatioPoint> points;
};

struct StudyResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;  // sorted by (n index, trial, method)
  std::vector<GroupSummary> groups;
  std::vector<RateFit> fits;
  std::vector<RatioCurve> curves;
};

inline constexpr double kMlLsAgreementRadius = 0.1;

// Draw, embed, estimate and align one trial of a simulation study.
std::vector<TrialRecord> RunTrial(const ExperimentConfig& cfg, int n_index, int trial);

StudyResult RunCltStudy(const ExperimentConfig& cfg);
StudyResult RunRateSweep(const ExperimentConfig& cfg);
StudyResult RunErrorRatio(const ExperimentConfig& cfg);
StudyResult RunStudy(const ExperimentConfig& cfg);

// Pure fold of records into group summaries and rate fits.
void Summarize(StudyResult& result);

// Median of a non-empty list.
double Median(std::vector<double> values);

}  // namespace oos_ase

#endif  // OOS_ASE_EXPERIMENTS_H_
