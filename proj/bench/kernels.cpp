// Serial reference against the OpenMP path for the per-node kernels. The
// second argument selects the policy: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <cmath>

#include "rmcf/coupled_flow.hpp"

using namespace rmcf;

namespace {

Exec policy(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

FlowState bumpy(int M) {
  ProfileShape sh;
  sh.amplitude = 0.02;
  sh.phi_modes = {0.3, 0.5, 1.0};
  FlowState s;
  s.metric = build_perturbed(2, M, sh);
  s.curve = graph_curve([](double a) { return 0.45 + 0.04 * std::cos(a) + 0.02 * std::cos(2.0 * a); }, M);
  return s;
}

void BM_curvature(benchmark::State& st) {
  const auto s = bumpy(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(curvature(s.metric, policy(st)));
}

void BM_shape(benchmark::State& st) {
  const auto s = bumpy(static_cast<int>(st.range(0)));
  const auto p = PinchingParams::for_dimension(2);
  for (auto _ : st) benchmark::DoNotOptimize(shape(s.curve, s.metric, p, policy(st)));
}

void BM_nrf_step(benchmark::State& st) {
  const auto s = bumpy(static_cast<int>(st.range(0)));
  const double dt = 0.5 * ambient_dt_limit(s.metric);
  for (auto _ : st) benchmark::DoNotOptimize(nrf_step(s.metric, dt, kDefaultCfl, 0.0, policy(st)));
}

void BM_coupled_step(benchmark::State& st) {
  const auto s = bumpy(static_cast<int>(st.range(0)));
  CoupledOptions opt;
  opt.exec = policy(st);
  const double dt = 0.5 * coupled_dt_limit(s, opt);
  for (auto _ : st) benchmark::DoNotOptimize(coupled_step(s, dt, opt));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int M : {100, 400, 1600})
    for (int par : {0, 1}) b->Args({M, par});
  b->ArgNames({"M", "parallel"});
}

}  // namespace

BENCHMARK(BM_curvature)->Apply(sizes);
BENCHMARK(BM_shape)->Apply(sizes);
BENCHMARK(BM_nrf_step)->Apply(sizes);
BENCHMARK(BM_coupled_step)->Apply(sizes);

BENCHMARK_MAIN();
