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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oos_ase/embed.h"
#include "oos_ase/error.h"
#include "oos_ase/experiments.h"
#include "oos_ase/io.h"
#include "oos_ase/oos.h"
#include "oos_ase/rdpg.h"
#include "oos_ase/rng.h"

namespace oos_ase::cli {
namespace {

namespace fs = std::filesystem;

struct SampleArgs {
  std::string spec;
  int n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct EmbedArgs {
  std::string graph;
  int dim = 0;
  std::string out;
};

struct OosArgs {
  std::string embedding;
  std::string edges;
  std::string method = "ls";
  double eps = 0.05;
  int max_iter = 500;
};

struct ExperimentArgs {
  std::string study;
  std::string spec;
  std::string classify_spec;
  std::vector<int> n_grid;
  std::vector<int> m_grid;
  int trials = 100;
  int dim = 0;
  double eps = 0.05;
  std::uint64_t seed = 0;
  std::optional<int> workers;
  std::string out;
  std::string wbar_mode = "draw";
  int fixed_atom = 0;
  bool noiseless = false;
  std::string alignment = "procrustes";
};

[[noreturn]] void ConfigError(const std::string& message) {
  throw Error(ErrorKind::kConfig, message);
}

void RequireOutputParent(const fs::path& path) {
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw Error(ErrorKind::kIo, "output directory '" + parent.string() + "' does not exist");
  }
}

std::string WithSuffix(const std::string& prefix, const char* suffix) {
  return prefix + suffix;
}

int WorkersFromEnvironment() {
  const char* env = std::getenv("OOS_ASE_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 1024) {
    ConfigError(std::string("OOS_ASE_WORKERS must be a positive integer, got '") + env + "'");
  }
  return static_cast<int>(value);
}

int CmdSample(const SampleArgs& args, std::ostream& out) {
  if (args.n < 1) ConfigError("--n must be >= 1");
  const fs::path dir(args.out);
  RequireOutputParent(dir);
  const LatentDistribution dist = io::ParseDistribution(io::ReadFile(args.spec));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());

  // Row n of the latent draw is the out-of-sample vertex.
  const LatentMatrix all = SampleLatents(
      dist, args.n + 1, RngSeed{args.seed, DeriveStream(0, 0, StreamPurpose::kLatents)});
  LatentMatrix x;
  x.rows = all.rows.topRows(args.n);
  x.atom_index.assign(all.atom_index.begin(), all.atom_index.begin() + args.n);
  x.seed = all.seed;
  const Vector wbar = all.rows.row(args.n).transpose();

  const AdjacencyMatrix a =
      SampleAdjacency(x, RngSeed{args.seed, DeriveStream(0, 0, StreamPurpose::kAdjacency)});
  const EdgeVector e = SampleOosEdges(
      x, wbar, RngSeed{args.seed, DeriveStream(0, 0, StreamPurpose::kOosEdges)});

  std::ostringstream graph, latents, edges, oos_latent;
  io::WriteGraph(graph, a);
  io::WriteMatrixCsv(latents, x.rows);
  io::WriteEdgeVectorCsv(edges, e);
  io::WriteMatrixCsv(oos_latent, wbar.transpose());
  io::WriteFile(dir / "graph.txt", graph.str());
  io::WriteFile(dir / "latents.csv", latents.str());
  io::WriteFile(dir / "oos_edges.csv", edges.str());
  io::WriteFile(dir / "oos_latent.csv", oos_latent.str());
  out << "{\"n\": " << args.n << ", \"edges\": " << a.EdgeCount()
      << ", \"oos_degree\": " << e.AsVector().sum() << "}\n";
  return 0;
}

int CmdEmbed(const EmbedArgs& args, std::ostream& out) {
  if (args.dim < 1) ConfigError("--dim must be >= 1");
  const std::string csv_path = WithSuffix(args.out, ".csv");
  const std::string json_path = WithSuffix(args.out, ".json");
  RequireOutputParent(csv_path);
  std::istringstream graph_text(io::ReadFile(args.graph));
  const AdjacencyMatrix a = io::ReadGraph(graph_text);
  if (args.dim > a.order()) ConfigError("--dim exceeds the number of vertices");

  const Embedding emb = Ase(a, args.dim);
  std::ostringstream csv, sidecar;
  io::WriteEmbedding(csv, sidecar, emb);
  io::WriteFile(csv_path, csv.str());
  io::WriteFile(json_path, sidecar.str());
  out << "{\"n\": " << emb.size() << ", \"d\": " << emb.dimension() << "}\n";
  return 0;
}

int CmdOos(const OosArgs& args, std::ostream& out, std::ostream& err) {
  const OosMethod method = ParseMethod(args.method);
  std::istringstream csv(io::ReadFile(WithSuffix(args.embedding, ".csv")));
  std::istringstream sidecar(io::ReadFile(WithSuffix(args.embedding, ".json")));
  std::istringstream edge_text(io::ReadFile(args.edges));
  const Embedding emb = io::ReadEmbedding(csv, sidecar);
  const EdgeVector e = io::ReadEdgeVectorCsv(edge_text);
  if (e.size() != emb.size()) {
    ConfigError("edge vector has " + std::to_string(e.size()) + " entries, embedding has " +
                std::to_string(emb.size()) + " rows");
  }
  try {
    const OosEstimate est =
        method == OosMethod::kLeastSquares
            ? LlsOos(emb, e)
            : MlOos(emb, e, MlOptions{.epsilon = args.eps, .tol = 0.0, .max_iter = args.max_iter});
    out << io::EstimateToJson(est) << '\n';
  } catch (const SolverError& ex) {
    err << io::SolverErrorToJson(ex) << '\n';
    return ExitCodeFor(ex.kind());
  }
  return 0;
}

int CmdExperiment(const ExperimentArgs& args, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.study = ParseStudy(args.study);
  if (cfg.study == Study::kErrorRatio) {
    if (args.classify_spec.empty()) ConfigError("--study ratio needs --classify-spec");
    cfg.classify = io::ParseClassifySpec(io::ReadFile(args.classify_spec));
    cfg.n_grid = args.n_grid.empty() ? std::vector<int>{100, 1000, 10000} : args.n_grid;
    cfg.m_grid = args.m_grid;
  } else {
    if (args.spec.empty()) ConfigError("--study " + args.study + " needs --spec");
    cfg.dist = io::ParseDistribution(io::ReadFile(args.spec));
    if (!args.n_grid.empty()) {
      cfg.n_grid = args.n_grid;
    } else if (cfg.study == Study::kRateSweep) {
      cfg.n_grid = {100, 200, 400, 800, 1600};
    } else {
      cfg.n_grid = {500};
    }
    cfg.d = args.dim > 0 ? args.dim : cfg.dist->dimension();
  }
  cfg.trials = args.trials;
  cfg.epsilon = args.eps;
  cfg.master_seed = args.seed;
  cfg.workers = args.workers ? *args.workers : WorkersFromEnvironment();
  cfg.fixed_atom = args.fixed_atom;
  cfg.noiseless = args.noiseless;
  cfg.wbar_mode = args.wbar_mode == "fixed" ? WbarMode::kFixedAtom : WbarMode::kDrawFromF;
  cfg.alignment =
      args.alignment == "clt-rotation" ? Alignment::kCltRotation : Alignment::kProcrustes;
  cfg.Validate();
  if (!args.out.empty()) RequireOutputParent(fs::path(args.out));

  const StudyResult result = RunStudy(cfg);
  if (!args.out.empty()) io::WriteStudyOutputs(args.out, result);
  out << io::SummaryToJson(result);
  return 0;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random dot product graph embedding and out-of-sample extension", "oos_ase"};
  app.require_subcommand(1);
  app.allow_extras(false);

  SampleArgs sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Sample a graph and an out-of-sample vertex");
  sample_cmd->add_option("--spec", sample.spec, "Distribution spec (JSON)")
      ->required();
  sample_cmd->add_option("--n", sample.n, "Number of in-sample vertices")->required();
  sample_cmd->add_option("--seed", sample.seed, "Master seed");
  sample_cmd->add_option("--out", sample.out, "Output directory")->required();

  EmbedArgs embed;
  CLI::App* embed_cmd = app.add_subcommand("embed", "Adjacency spectral embedding of a graph");
  embed_cmd->add_option("--graph", embed.graph, "Edge list")->required();
  embed_cmd->add_option("--dim", embed.dim, "Embedding dimension")->required();
  embed_cmd->add_option("--out", embed.out, "Output prefix (<prefix>.csv, <prefix>.json)")
      ->required();

  OosArgs oos;
  CLI::App* oos_cmd = app.add_subcommand("oos", "Embed one out-of-sample vertex");
  oos_cmd->add_option("--embedding", oos.embedding, "Embedding prefix")->required();
  oos_cmd->add_option("--edges", oos.edges, "Edge vector CSV")
      ->required();
  oos_cmd->add_option("--method", oos.method, "ls or ml")
      ->check(CLI::IsMember({"ls", "LS", "ml", "ML"}));
  oos_cmd->add_option("--eps", oos.eps, "Feasibility margin for ml");
  oos_cmd->add_option("--max-iter", oos.max_iter, "Iteration cap for ml");

  ExperimentArgs exp;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Run a Monte-Carlo or analytic study");
  exp_cmd->add_option("--study", exp.study, "clt-ls, clt-ml, rate or ratio")
      ->required()
      ->check(CLI::IsMember({"clt-ls", "clt-ml", "rate", "ratio"}));
  exp_cmd->add_option("--spec", exp.spec, "Distribution spec (JSON)");
  exp_cmd->add_option("--classify-spec", exp.classify_spec, "Classification spec (JSON)");
  exp_cmd->add_option("--n-grid", exp.n_grid, "Graph sizes")->delimiter(',');
  exp_cmd->add_option("--m-grid", exp.m_grid, "Added-vertex counts (ratio study)")
      ->delimiter(',');
  exp_cmd->add_option("--trials", exp.trials, "Trials per graph size");
  exp_cmd->add_option("--dim", exp.dim, "Embedding dimension (default: spec dimension)");
  exp_cmd->add_option("--eps", exp.eps, "Feasibility margin for ml");
  exp_cmd->add_option("--seed", exp.seed, "Master seed");
  exp_cmd->add_option("--workers", exp.workers, "Worker threads (default: $OOS_ASE_WORKERS or 1)");
  exp_cmd->add_option("--out", exp.out, "Output directory");
  exp_cmd->add_option("--wbar-mode", exp.wbar_mode, "draw or fixed")
      ->check(CLI::IsMember({"draw", "fixed"}));
  exp_cmd->add_option("--fixed-atom", exp.fixed_atom, "Atom index for --wbar-mode fixed");
  exp_cmd->add_flag("--noiseless", exp.noiseless, "Use P and X wbar instead of samples");
  exp_cmd->add_option("--alignment", exp.alignment, "procrustes or clt-rotation")
      ->check(CLI::IsMember({"procrustes", "clt-rotation"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : ExitCodeFor(ErrorKind::kConfig);
  }

  try {
    if (*sample_cmd) return CmdSample(sample, out);
    if (*embed_cmd) return CmdEmbed(embed, out);
    if (*oos_cmd) return CmdOos(oos, out, err);
    return CmdExperiment(exp, out);
  } catch (const Error& e) {
    err << "error (" << ErrorKindName(e.kind()) << "): " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace oos_ase::cli
