#include "chedra/linkage.hpp"
#include "chedra/net.hpp"
#include "chedra/validation.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <optional>
#include <vector>

using namespace chedra;

namespace {

// Case-2a linkage with p generated columns (s_j != t_j).
LinkageSpec collineation(int p) {
  LinkageSpec L;
  L.initial = {2.0, 1.0, 1.0, -1.0, 0.0};
  L.a_ref = 2.0;
  for (int j = 1; j <= p; ++j) {
    L.others.push_back(extend_sublinkage(L.initial, CaseLabel::Collineation_2a, 2.0 + 0.5 * j / p, 1.0 + 0.3 * j / p,
                                         1.2 * j / p));
  }
  return L;
}

LinkageSpec perspectivity(int p) {
  LinkageSpec L;
  L.initial = {1.0, 2.0, 1.0, 3.0, 0.0};
  L.a_ref = 2.95;
  for (int j = 1; j <= p; ++j) {
    L.others.push_back(extend_sublinkage(L.initial, CaseLabel::Perspectivity_3, 1.0 + 0.5 * j / p, std::nullopt,
                                         1.2 * j / p));
  }
  return L;
}

void BM_Classify(benchmark::State& state) {
  const LinkageSpec L = collineation(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classify(L));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Classify)->Arg(4)->Arg(32)->Arg(256);

void BM_TipB(benchmark::State& state) {
  const Sublinkage L0{2.0, 1.0, 1.0, -1.0, 0.0};
  double a = 1.8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tip_b(a, L0, Branch::Plus));
    a = a < 2.9 ? a + 1e-6 : 1.8;
  }
}
BENCHMARK(BM_TipB);

void BM_BuildPatch(benchmark::State& state) {
  const LinkageSpec L = perspectivity(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_patch(L));
}
BENCHMARK(BM_BuildPatch)->Arg(4)->Arg(64);

// One flex per iteration, cycling through the home interval.
void BM_FlexSweep(benchmark::State& state) {
  const ConeNet net = build_patch(collineation(int(state.range(0))));
  const auto home = interval_containing(net_flexion_range(net), net.a_ref);
  const int n = 64;
  int i = 0;
  for (auto _ : state) {
    const double a = home->lo + (home->hi - home->lo) * (i + 0.5) / n;
    benchmark::DoNotOptimize(flex(net, a));
    i = (i + 1) % n;
  }
}
BENCHMARK(BM_FlexSweep)->Arg(4)->Arg(64);

void BM_FlexionRange(benchmark::State& state) {
  const LinkageSpec L = collineation(8);
  for (auto _ : state) benchmark::DoNotOptimize(flexion_range(L));
}
BENCHMARK(BM_FlexionRange)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const ConeNet net = build_patch(perspectivity(3));
  const Complex3x3 block = extract_block(net.vertices, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(kokotsakis_oracle(block));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

void BM_ParallelTransfer(benchmark::State& state) {
  const ConeNet net = build_patch(perspectivity(int(state.range(0))));
  const Grid& g = net.vertices;
  std::vector<double> rows, cols;
  for (std::size_t i = 0; i + 1 < g.cols(); ++i) rows.push_back(i % 2 ? 1.05 : 0.95);
  for (std::size_t i = 0; i + 1 < g.rows(); ++i) cols.push_back(i % 2 ? 0.9 : 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(parallel_transfer(g, rows, cols));
}
BENCHMARK(BM_ParallelTransfer)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
