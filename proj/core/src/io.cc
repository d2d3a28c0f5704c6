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

#include "oos_ase/io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oos_ase/error.h"

namespace oos_ase::io {
namespace {

using nlohmann::json;

constexpr std::string_view kGraphHeader = "oos-ase graph n=";

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

int ParseInt(std::string_view text, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Malformed("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

json VectorJson(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json MatrixJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(VectorJson(m.row(i).transpose()));
  return rows;
}

Vector VectorFromJson(const json& j, const std::string& field) {
  if (!j.is_array()) Malformed(field + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) Malformed(field + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json ParseJson(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    Malformed(std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
}

std::string Sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

json DiagnosticsJson(const OosDiagnostics& d) {
  json j;
  j["iterations"] = d.iterations;
  j["gradient_norm"] = d.gradient_norm;
  j["active_constraints"] = d.active_constraints;
  if (d.objective) j["objective"] = *d.objective;
  if (!d.initializer.empty()) j["initializer"] = d.initializer;
  return j;
}

json DistributionJson(const LatentDistribution& dist) {
  json j;
  j["dimension"] = dist.dimension();
  json atoms = json::array();
  for (const Atom& a : dist.atoms()) {
    atoms.push_back({{"point", VectorJson(a.point)}, {"weight", a.weight}});
  }
  j["atoms"] = atoms;
  return j;
}

json ConfigJson(const ExperimentConfig& cfg) {
  json j;
  j["study"] = std::string(StudyName(cfg.study));
  j["n_grid"] = cfg.n_grid;
  if (cfg.study == Study::kErrorRatio) {
    j["m_grid"] = cfg.m_grid;
    j["classify"] = {{"lambda", cfg.classify->lambda},
                     {"p", cfg.classify->p},
                     {"q", cfg.classify->q}};
    return j;
  }
  j["trials"] = cfg.trials;
  j["d"] = cfg.d;
  j["epsilon"] = cfg.epsilon;
  j["master_seed"] = cfg.master_seed;
  j["wbar_mode"] = cfg.wbar_mode == WbarMode::kFixedAtom ? "fixed" : "draw";
  if (cfg.wbar_mode == WbarMode::kFixedAtom) j["fixed_atom"] = cfg.fixed_atom;
  j["noiseless"] = cfg.noiseless;
  j["alignment"] = cfg.alignment == Alignment::kProcrustes ? "procrustes" : "clt-rotation";
  j["distribution"] = DistributionJson(*cfg.dist);
  return j;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double ParseDouble(std::string_view text, std::string_view what) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    Malformed("cannot parse " + std::string(what) + " from '" + s + "'");
  }
  return v;
}

void WriteGraph(std::ostream& out, const AdjacencyMatrix& a) {
  out << kGraphHeader << a.order() << '\n';
  for (const auto& [i, j] : a.Edges()) out << i << ' ' << j << '\n';
}

AdjacencyMatrix ReadGraph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kGraphHeader, 0) != 0) {
    Malformed("graph file must start with '" + std::string(kGraphHeader) + "<n>'");
  }
  const int n = ParseInt(std::string_view(line).substr(kGraphHeader.size()), "graph order");
  if (n < 1) Malformed("graph order must be >= 1");
  AdjacencyMatrix a(n);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long i = -1, j = -1;
    std::string rest;
    if (!(fields >> i >> j) || (fields >> rest) || i < 0 || j >= n || i >= j) {
      Malformed("graph line " + std::to_string(lineno) + ": expected 'i j' with 0 <= i < j < n");
    }
    a.Set(static_cast<int>(i), static_cast<int>(j), true);
  }
  return a;
}

void WriteMatrixCsv(std::ostream& out, const Matrix& m, std::string_view prefix) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c > 0) out << ',';
    out << prefix << c;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << FormatDouble(m(r, c));
    }
    out << '\n';
  }
}

Matrix ReadMatrixCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) Malformed("CSV is empty");
  const std::size_t cols = SplitCsv(line).size();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = SplitCsv(line);
    if (fields.size() != cols) {
      Malformed("CSV row " + std::to_string(rows.size() + 1) + " has " +
                std::to_string(fields.size()) + " fields, expected " + std::to_string(cols));
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(ParseDouble(f, "CSV entry"));
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void WriteEdgeVectorCsv(std::ostream& out, const EdgeVector& e) {
  out << "a\n";
  for (std::uint8_t b : e.bits) out << static_cast<int>(b) << '\n';
}

EdgeVector ReadEdgeVectorCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "a") Malformed("edge vector CSV must have header 'a'");
  EdgeVector e;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "0") {
      e.bits.push_back(0);
    } else if (line == "1") {
      e.bits.push_back(1);
    } else {
      Malformed("edge vector entries must be 0 or 1, got '" + line + "'");
    }
  }
  return e;
}

void WriteEmbedding(std::ostream& csv, std::ostream& sidecar, const Embedding& emb) {
  WriteMatrixCsv(csv, emb.positions);
  json j;
  j["d"] = emb.dimension();
  j["eigenvalues"] = VectorJson(emb.eig.values);
  j["sign_convention"] = "max-entry-positive";
  sidecar << j.dump(2) << '\n';
}

Embedding ReadEmbedding(std::istream& csv, std::istream& sidecar) {
  Matrix positions = ReadMatrixCsv(csv);
  std::stringstream buf;
  buf << sidecar.rdbuf();
  const json j = ParseJson(buf.str(), "embedding sidecar");
  if (!j.contains("d") || !j["d"].is_number_integer()) Malformed("embedding sidecar: missing field 'd'");
  if (!j.contains("eigenvalues")) Malformed("embedding sidecar: missing field 'eigenvalues'");
  const int d = j["d"].get<int>();
  Vector values = VectorFromJson(j["eigenvalues"], "eigenvalues");
  if (values.size() != d || positions.cols() != d) {
    Malformed("embedding sidecar: 'd' disagrees with the CSV or eigenvalue count");
  }
  return Embedding::FromPositions(std::move(positions), std::move(values));
}

LatentDistribution ParseDistribution(std::string_view json_text) {
  const json j = ParseJson(json_text, "distribution spec");
  if (!j.is_object()) Malformed("distribution spec must be a JSON object");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
    Malformed("distribution spec: field 'dimension' must be an integer");
  }
  if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty()) {
    Malformed("distribution spec: field 'atoms' must be a non-empty array");
  }
  const int d = j["dimension"].get<int>();
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < j["atoms"].size(); ++k) {
    const json& a = j["atoms"][k];
    const std::string where = "atoms[" + std::to_string(k) + "]";
    if (!a.is_object() || !a.contains("point")) Malformed(where + ".point is missing");
    if (!a.contains("weight") || !a["weight"].is_number()) {
      Malformed(where + ".weight must be a number");
    }
    Vector point = VectorFromJson(a["point"], where + ".point");
    if (point.size() != d) Malformed(where + ".point length differs from 'dimension'");
    atoms.push_back(Atom{std::move(point), a["weight"].get<double>()});
  }
  try {
    return LatentDistribution::Create(std::move(atoms));
  } catch (const Error& e) {
    Malformed(std::string("distribution spec: ") + e.what());
  }
}

std::string DistributionToJson(const LatentDistribution& dist) {
  return DistributionJson(dist).dump(2) + "\n";
}

ClassifySpec ParseClassifySpec(std::string_view json_text) {
  const json j = ParseJson(json_text, "classify spec");
  ClassifySpec spec;
  for (const char* field : {"lambda", "p", "q"}) {
    if (!j.is_object() || !j.contains(field) || !j[field].is_number()) {
      Malformed(std::string("classify spec: field '") + field + "' must be a number");
    }
  }
  spec.lambda = j["lambda"].get<double>();
  spec.p = j["p"].get<double>();
  spec.q = j["q"].get<double>();
  try {
    spec.Validate();
  } catch (const Error& e) {
    Malformed(e.what());
  }
  return spec;
}

std::string EstimateToJson(const OosEstimate& est) {
  json j;
  j["method"] = std::string(MethodName(est.method));
  j["w"] = VectorJson(est.w);
  j["diagnostics"] = DiagnosticsJson(est.diagnostics);
  return j.dump();
}

std::string SolverErrorToJson(const Error& err) {
  json j;
  j["error"] = std::string(ErrorKindName(err.kind()));
  j["message"] = err.what();
  if (const auto* solver = dynamic_cast<const SolverError*>(&err)) {
    j["last_iterate"] = VectorJson(solver->last_iterate());
    j["diagnostics"] = DiagnosticsJson(solver->diagnostics());
  }
  return j.dump();
}

void WriteTrialsCsv(std::ostream& out, const StudyResult& result) {
  const int d = result.config.d;
  out << "trial,n,method,atom";
  for (const char* block : {"wbar", "estimate", "aligned"}) {
    for (int k = 0; k < d; ++k) out << ',' << block << '_' << k;
  }
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) out << ",rotation_" << r << '_' << c;
  }
  out << ",aligned_error,status,error\n";
  auto put_vector = [&](const Vector& v, bool ok) {
    for (int k = 0; k < d; ++k) {
      out << ',';
      if (ok && v.size() == d) out << FormatDouble(v(k));
    }
  };
  for (const TrialRecord& rec : result.records) {
    out << rec.trial << ',' << rec.n << ',' << MethodName(rec.method) << ',' << rec.atom;
    put_vector(rec.wbar, true);
    put_vector(rec.estimate, rec.ok);
    put_vector(rec.aligned, rec.ok);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        out << ',';
        if (rec.ok) out << FormatDouble(rec.rotation(r, c));
      }
    }
    out << ',';
    if (rec.ok) out << FormatDouble(rec.aligned_error);
    out << ',' << (rec.ok ? "ok" : "failed") << ',' << Sanitize(rec.error) << '\n';
  }
}

std::vector<TrialRecord> ReadTrialsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) Malformed("trials.csv is empty");
  const auto header = SplitCsv(line);
  int d = 0;
  for (const auto& h : header) {
    if (h.rfind("wbar_", 0) == 0) ++d;
  }
  const std::size_t expected = 4 + 3 * static_cast<std::size_t>(d) +
                               static_cast<std::size_t>(d * d) + 3;
  if (d == 0 || header.size() != expected) Malformed("trials.csv: unexpected header");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = SplitCsv(line);
    if (f.size() < expected) Malformed("trials.csv: short row");
    TrialRecord rec;
    std::size_t col = 0;
    rec.trial = ParseInt(f[col++], "trial");
    rec.n = ParseInt(f[col++], "n");
    rec.method = ParseMethod(f[col++]);
    rec.atom = ParseInt(f[col++], "atom");
    rec.ok = f[expected - 2] == "ok";
    auto get_vector = [&](bool present) {
      Vector v(d);
      for (int k = 0; k < d; ++k, ++col) {
        if (present) v(k) = ParseDouble(f[col], "trials.csv value");
      }
      return present ? v : Vector();
    };
    rec.wbar = get_vector(true);
    rec.estimate = get_vector(rec.ok);
    rec.aligned = get_vector(rec.ok);
    if (rec.ok) rec.rotation.resize(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c, ++col) {
        if (rec.ok) rec.rotation(r, c) = ParseDouble(f[col], "trials.csv rotation");
      }
    }
    if (rec.ok) rec.aligned_error = ParseDouble(f[col], "aligned_error");
    rec.error = f[expected - 1];
    records.push_back(std::move(rec));
  }
  return records;
}

std::string SummaryToJson(const StudyResult& result) {
  json j;
  j["config"] = ConfigJson(result.config);
  if (result.config.study == Study::kErrorRatio) {
    json curves = json::array();
    for (const RatioCurve& c : result.curves) {
      json pts = json::array();
      for (const RatioPoint& p : c.points) pts.push_back({{"m", p.m}, {"ratio", p.ratio}});
      curves.push_back({{"n", c.n}, {"points", pts}});
    }
    j["curves"] = curves;
    return j.dump(2) + "\n";
  }
  json groups = json::array();
  int total = 0;
  int failures = 0;
  for (const GroupSummary& g : result.groups) {
    total += g.trials;
    failures += g.failures;
    json gj;
    gj["n"] = g.n;
    gj["method"] = std::string(MethodName(g.method));
    gj["trials"] = g.trials;
    gj["failures"] = g.failures;
    gj["median_error"] = g.median_error;
    gj["coverage68"] = g.coverage68;
    gj["coverage95"] = g.coverage95;
    if (g.scaled_covariance.size() > 0) gj["scaled_covariance"] = MatrixJson(g.scaled_covariance);
    if (g.ls_agreement) gj["ls_agreement"] = *g.ls_agreement;
    json atoms = json::array();
    for (const AtomSummary& a : g.atoms) {
      atoms.push_back({{"atom", a.atom},
                       {"count", a.count},
                       {"mean", VectorJson(a.mean)},
                       {"covariance", MatrixJson(a.covariance)},
                       {"theoretical_covariance", MatrixJson(a.theoretical_covariance)},
                       {"coverage68", a.coverage68},
                       {"coverage95", a.coverage95}});
    }
    gj["atoms"] = atoms;
    groups.push_back(gj);
  }
  j["groups"] = groups;
  j["failure_rate"] = total > 0 ? static_cast<double>(failures) / total : 0.0;
  if (!result.fits.empty()) {
    json fits = json::array();
    for (const RateFit& f : result.fits) {
      fits.push_back({{"method", std::string(MethodName(f.method))},
                      {"slope", f.slope},
                      {"intercept", f.intercept}});
    }
    j["rate_fits"] = fits;
  }
  return j.dump(2) + "\n";
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

void WriteStudyOutputs(const std::filesystem::path& dir, const StudyResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "plotdata", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());

  WriteFile(dir / "summary.json", SummaryToJson(result));
  const ExperimentConfig& cfg = result.config;

  if (cfg.study == Study::kErrorRatio) {
    for (const RatioCurve& c : result.curves) {
      std::ostringstream out;
      out << "m,ratio\n";
      for (const RatioPoint& p : c.points) out << p.m << ',' << FormatDouble(p.ratio) << '\n';
      WriteFile(dir / "plotdata" / ("error_ratio_n" + std::to_string(c.n) + ".csv"), out.str());
    }
    return;
  }

  std::ostringstream trials;
  WriteTrialsCsv(trials, result);
  WriteFile(dir / "trials.csv", trials.str());

  if (cfg.study == Study::kRateSweep) {
    std::ostringstream out;
    out << "n,method,median_error,failures\n";
    for (const GroupSummary& g : result.groups) {
      out << g.n << ',' << MethodName(g.method) << ',' << FormatDouble(g.median_error) << ','
          << g.failures << '\n';
    }
    WriteFile(dir / "plotdata" / "rate.csv", out.str());
    return;
  }

  for (int n : cfg.n_grid) {
    for (OosMethod method : cfg.Methods()) {
      std::ostringstream out;
      out << "atom";
      for (int k = 0; k < cfg.d; ++k) out << ",aligned_" << k;
      out << '\n';
      for (const TrialRecord& rec : result.records) {
        if (rec.n != n || rec.method != method || !rec.ok) continue;
        out << rec.atom;
        for (int k = 0; k < cfg.d; ++k) out << ',' << FormatDouble(rec.aligned(k));
        out << '\n';
      }
      std::string name = "clt_scatter_n" + std::to_string(n) + "_" +
                         std::string(MethodName(method)) + ".csv";
      WriteFile(dir / "plotdata" / name, out.str());
    }
    // Limiting normal per atom, for drawing the 68% / 95% contours.
    std::ostringstream contours;
    contours << "atom,weight";
    for (int k = 0; k < cfg.d; ++k) contours << ",mean_" << k;
    for (int r = 0; r < cfg.d; ++r) {
      for (int c = 0; c < cfg.d; ++c) contours << ",cov_" << r << '_' << c;
    }
    contours << ",chi2_68,chi2_95\n";
    const auto& atoms = cfg.dist->atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const AsymptoticNormal limit = OosLimitingNormal(*cfg.dist, atoms[k].point, n);
      contours << k << ',' << FormatDouble(atoms[k].weight);
      for (int i = 0; i < cfg.d; ++i) contours << ',' << FormatDouble(limit.mean(i));
      for (int r = 0; r < cfg.d; ++r) {
        for (int c = 0; c < cfg.d; ++c) contours << ',' << FormatDouble(limit.covariance(r, c));
      }
      contours << ',' << FormatDouble(ChiSquare2Quantile(0.68)) << ','
               << FormatDouble(ChiSquare2Quantile(0.95)) << '\n';
    }
    WriteFile(dir / "plotdata" / ("clt_contours_n" + std::to_string(n) + ".csv"),
              contours.str());
  }
}

}  // namespace oos_ase::io
