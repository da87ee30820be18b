#include <benchmark/benchmark.h>

#include "cartan/foliation.hpp"
#include "cartan/indicatrix.hpp"
#include "cartan/oracle.hpp"
#include "lab/suite.hpp"

using namespace cartan;

namespace {

const char* kRanders3 = "sqrt(p1^2+p2^2+p3^2)+0.05*p1";

void BM_ParseDifferentiate(benchmark::State& state) {
  for (auto _ : state) {
    const auto m = parse_metric(kRanders3, 3, MetricKind::K);
    const MultiIndex mi = {{{Coord::P, 0}, 2}, {{Coord::P, 1}, 1}};
    benchmark::DoNotOptimize(m.differentiate(mi));
  }
}
BENCHMARK(BM_ParseDifferentiate);

void BM_BuildGeometry(benchmark::State& state) {
  for (auto _ : state) {
    CartanGeometry geo(parse_metric(kRanders3, 3, MetricKind::K));
    benchmark::DoNotOptimize(geo.k2());
  }
  state.SetLabel("randers 3d");
}
BENCHMARK(BM_BuildGeometry)->Unit(benchmark::kMillisecond);

void BM_ComputeTensors(benchmark::State& state) {
  const CartanGeometry geo(parse_metric(kRanders3, 3, MetricKind::K));
  const PhasePoint pt({0.1, 0.2, 0.3}, {0.8, -0.4, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(compute_tensors(geo, pt));
}
BENCHMARK(BM_ComputeTensors)->Unit(benchmark::kMicrosecond);

void BM_KoszulOracle(benchmark::State& state) {
  const OracleMetric om(kRanders3, 3, MetricKind::K);
  const PhasePoint pt({0.1, 0.2, 0.3}, {0.8, -0.4, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(koszul_oracle(om, pt));
}
BENCHMARK(BM_KoszulOracle)->Unit(benchmark::kMillisecond);

void BM_FrameConnection(benchmark::State& state) {
  const CartanGeometry geo(parse_metric(kRanders3, 3, MetricKind::K));
  FrameLibrary lib(geo);
  const PhasePoint pt({0.1, 0.2, 0.3}, {0.8, -0.4, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(frame_connection(lib, pt));
}
BENCHMARK(BM_FrameConnection)->Unit(benchmark::kMillisecond);

void BM_GaussRelations(benchmark::State& state) {
  const CartanGeometry geo(parse_metric(kRanders3, 3, MetricKind::K));
  FrameLibrary lib(geo);
  const auto ip = make_indicatrix_point(lib, PhasePoint({0.1, 0.2, 0.3}, {0.8, -0.4, 0.2}), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gauss_relations_check(lib, ip));
}
BENCHMARK(BM_GaussRelations)->Unit(benchmark::kMillisecond);

void BM_RunSuite(benchmark::State& state) {
  lab::RunConfig cfg;
  cfg.builtin = "randers-3d-eps0.05";
  cfg.num_points = static_cast<int>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lab::run_suite(cfg));
}
BENCHMARK(BM_RunSuite)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
