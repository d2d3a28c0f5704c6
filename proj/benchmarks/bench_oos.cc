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

// Cost of embedding one new vertex: LS and ML extensions against a full
// re-embedding of the augmented graph.

#include <benchmark/benchmark.h>

#include "oos_ase/embed.h"
#include "oos_ase/oos.h"
#include "oos_ase/rdpg.h"

namespace oos_ase {
namespace {

struct Fixture {
  AdjacencyMatrix a{1};
  Embedding emb;
  EdgeVector edges;
};

Fixture MakeFixture(int n) {
  Vector x1(2), x2(2);
  x1 << 0.2, 0.7;
  x2 << 0.65, 0.3;
  const LatentDistribution dist = LatentDistribution::TwoPoint(0.4, x1, x2);
  const LatentMatrix x = SampleLatents(dist, n, RngSeed{1, 1});
  Fixture f;
  f.a = SampleAdjacency(x, RngSeed{1, 2});
  f.emb = Ase(f.a, 2);
  f.edges = SampleOosEdges(x, x1, RngSeed{1, 3});
  return f;
}

void BM_LsOos(benchmark::State& state) {
  const Fixture f = MakeFixture(static_cast<int>(state.range(0)));
  const Vector a = f.edges.AsVector();
  for (auto _ : state) benchmark::DoNotOptimize(LlsOos(f.emb, a));
}

void BM_MlOos(benchmark::State& state) {
  const Fixture f = MakeFixture(static_cast<int>(state.range(0)));
  const Vector a = f.edges.AsVector();
  for (auto _ : state) benchmark::DoNotOptimize(MlOos(f.emb, a));
}

void BM_FullReembed(benchmark::State& state) {
  const Fixture f = MakeFixture(static_cast<int>(state.range(0)));
  const AdjacencyMatrix augmented = Augment(f.a, f.edges);
  for (auto _ : state) benchmark::DoNotOptimize(EmbedFull(augmented, 2));
}

BENCHMARK(BM_LsOos)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000);
BENCHMARK(BM_MlOos)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000);
BENCHMARK(BM_FullReembed)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace oos_ase

BENCHMARK_MAIN();
