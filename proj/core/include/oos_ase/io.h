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

#ifndef OOS_ASE_IO_H_
#define OOS_ASE_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "oos_ase/clt_theory.h"
#include "oos_ase/embed.h"
#include "oos_ase/experiments.h"
#include "oos_ase/oos.h"
#include "oos_ase/rdpg.h"

namespace oos_ase::io {

// 17 significant digits; parsing the text gives back the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text, std::string_view what);

// Edge list: a header line "oos-ase graph n=<n>" followed by one "i j" line
// per edge (0-based, i < j, row-major order).
void WriteGraph(std::ostream& out, const AdjacencyMatrix& a);
AdjacencyMatrix ReadGraph(std::istream& in);

// CSV with a header row of column names and one row per vertex.
void WriteMatrixCsv(std::ostream& out, const Matrix& m, std::string_view prefix = "x");
Matrix ReadMatrixCsv(std::istream& in);

// Edge vector as a single-column CSV (header "a", one 0/1 row per vertex).
void WriteEdgeVectorCsv(std::ostream& out, const EdgeVector& e);
EdgeVector ReadEdgeVectorCsv(std::istream& in);

// Embedding: positions CSV plus a JSON sidecar
// {"d", "eigenvalues", "sign_convention": "max-entry-positive"}.
void WriteEmbedding(std::ostream& csv, std::ostream& sidecar, const Embedding& emb);
Embedding ReadEmbedding(std::istream& csv, std::istream& sidecar);

// Distribution spec: {"dimension": d, "atoms": [{"point": [...], "weight": w}]}.
LatentDistribution ParseDistribution(std::string_view json_text);
std::string DistributionToJson(const LatentDistribution& dist);

// Classification spec: {"lambda": l, "p": p, "q": q}.
ClassifySpec ParseClassifySpec(std::string_view json_text);

// {"method", "w", "diagnostics": {...}} on one line.
std::string EstimateToJson(const OosEstimate& est);
std::string SolverErrorToJson(const Error& err);

// trials.csv; failed records keep empty numeric fields.
void WriteTrialsCsv(std::ostream& out, const StudyResult& result);
std::vector<TrialRecord> ReadTrialsCsv(std::istream& in);

std::string SummaryToJson(const StudyResult& result);

// Writes trials.csv, summary.json and plotdata/*.csv under dir (created if
// missing). Output depends only on the config and records, never on timing
// or worker count.
void WriteStudyOutputs(const std::filesystem::path& dir, const StudyResult& result);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace oos_ase::io

#endif  // OOS_ASE_IO_H_
