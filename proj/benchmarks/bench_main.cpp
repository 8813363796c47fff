#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "frontlab/evolve.hpp"
#include "frontlab/front.hpp"
#include "frontlab/modulus.hpp"
#include "frontlab/spectral.hpp"

using namespace frontlab;

namespace {

ScalarField saddle(int n) {
  Grid g(n);
  ScalarField q(g, FieldKind::QgTheta);
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2)
      q(j1, j2) = std::sin(g.x1(j1)) * std::sin(g.x2(j2)) + std::cos(g.x2(j2));
  q.remove_mean();
  return q;
}

void BM_ForwardInverse(benchmark::State& state) {
  const auto q = saddle(int(state.range(0)));
  for (auto _ : state) {
    auto back = from_spectral(to_spectral(q));
    benchmark::DoNotOptimize(back.values().data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(q.grid().size()));
}
BENCHMARK(BM_ForwardInverse)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

void BM_Rhs(benchmark::State& state) {
  const auto q = saddle(int(state.range(0)));
  evolve::Evolver ev(q.grid(), q.kind(), {});
  for (auto _ : state) {
    auto r = ev.rhs(q);
    benchmark::DoNotOptimize(r.values().data());
  }
}
BENCHMARK(BM_Rhs)->Arg(64)->Arg(128)->Arg(256);

void BM_Step(benchmark::State& state) {
  const auto q = saddle(int(state.range(0)));
  evolve::SolverConfig cfg;
  cfg.dt_init = 1e-3;
  evolve::Evolver ev(q.grid(), q.kind(), cfg);
  const evolve::SimulationState s{0.0, q, 0, 0.0};
  for (auto _ : state) {
    auto next = ev.step(s);
    benchmark::DoNotOptimize(next.t);
  }
}
BENCHMARK(BM_Step)->Arg(128)->Arg(256);

void BM_EvaluateAt(benchmark::State& state) {
  const auto c = to_spectral(saddle(int(state.range(0))));
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i < 64; ++i) pts.push_back({0.1 + 0.09 * i, 2.0 + 0.01 * i});
  for (auto _ : state) {
    auto v = evaluate_field_at(c, pts);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(pts.size()));
}
BENCHMARK(BM_EvaluateAt)->Arg(64)->Arg(256);

void BM_ExtractLevelCurve(benchmark::State& state) {
  const auto c = to_spectral(saddle(int(state.range(0))));
  for (auto _ : state) {
    auto curve = front::extract_level_curve(c, 0.4, {2.6, 3.6}, {0.3, 3.0});
    benchmark::DoNotOptimize(curve.samples.data());
  }
}
BENCHMARK(BM_ExtractLevelCurve)->Arg(128)->Arg(256);

void BM_EstimateModulus(benchmark::State& state) {
  const auto psi = stream_function(saddle(128));
  modulus::SamplingPlan plan;
  plan.pair_count = std::size_t(state.range(0));
  const auto pairs = modulus::generate_pairs(plan);
  for (auto _ : state) {
    auto est = modulus::estimate_modulus(psi, FieldKind::QgTheta, pairs);
    benchmark::DoNotOptimize(est.M_hat);
  }
}
BENCHMARK(BM_EstimateModulus)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
