#include <benchmark/benchmark.h>

#include <cmath>

#include <osc_parareal/osc_parareal.hpp>

using namespace osc;

static void Rk4Segment(benchmark::State& state) {
  auto s = make_problem("spiral2", 1e-3);
  const State u = s.problem->initial();
  const double h = 1e-3 / 200;
  for (auto _ : state) {
    State v = propagate_fixed(*s.problem, RhsKind::full, u, 0.0, state.range(0) * h, h);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Rk4Segment)->RangeMultiplier(4)->Range(64, 4096);

static void AdaptiveSegment(benchmark::State& state) {
  auto s = make_problem("spiral1", 1e-3);
  for (auto _ : state) {
    State v = propagate_adaptive(*s.problem, RhsKind::full, s.problem->initial(), 0.0, 0.1, 1e-13, 1e-11);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(AdaptiveSegment)->Unit(benchmark::kMillisecond);

static void VerletSegment(benchmark::State& state) {
  auto s = make_problem("fpu", 1e-3);
  for (auto _ : state) {
    State v = propagate_verlet(*s.problem, s.problem->initial(), 0.0, 0.25, s.fine.h);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(VerletSegment)->Unit(benchmark::kMillisecond);

static void KernelConstruction(benchmark::State& state) {
  for (auto _ : state) {
    auto k = make_kernel(static_cast<int>(state.range(0)), 2);
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(KernelConstruction)->DenseRange(0, 5);

static void PoincareStep(benchmark::State& state) {
  auto s = make_problem("spiral2", 1e-3);
  s.poincare.estimator = state.range(0) ? Estimator::z_symmetric : Estimator::fe_chord;
  for (auto _ : state) {
    State v = poincare_step(*s.problem, s.poincare, s.problem->initial(), 0.0, s.H);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(PoincareStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void LocalAlign(benchmark::State& state) {
  auto s = make_problem("spiral2", 1e-3);
  set_alignment_warnings(false);
  const State u0 = s.problem->initial();
  State v0 = u0;
  v0[0] = std::cos(1.0);
  v0[1] = std::sin(1.0);
  for (auto _ : state) {
    auto r = local_align(*s.problem, s.alignment, u0, v0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(LocalAlign)->Unit(benchmark::kMillisecond);

static void PararealIteration(benchmark::State& state) {
  auto s = make_problem("spiral2", 1e-3);
  s.T = 0.8;
  s.K = 1;
  s.mode = static_cast<PararealMode>(state.range(0));
  const auto cfg = s.parareal_config(0);
  for (auto _ : state) {
    auto run = run_parareal(*s.problem, cfg, s.problem->initial());
    benchmark::DoNotOptimize(run);
  }
}
BENCHMARK(PararealIteration)
    ->Arg(static_cast<int>(PararealMode::naive))
    ->Arg(static_cast<int>(PararealMode::slow_only))
    ->Arg(static_cast<int>(PararealMode::full_state))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
