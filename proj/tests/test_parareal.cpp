#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include <osc_parareal/metrics.hpp>
#include <osc_parareal/parareal.hpp>
#include <osc_parareal/problems.hpp>
#include <osc_parareal/table1.hpp>

using namespace osc;

namespace {

bool bitwise_equal(const State& a, const State& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

// Short spiral II setup, cheap enough for property checks.
BenchmarkSpec short_spiral2(PararealMode mode) {
  auto s = make_problem("spiral2", 5e-3);
  s.T = 0.6;
  s.H = 0.1;
  s.K = 3;
  s.mode = mode;
  return s;
}

void check_prefix(const BenchmarkSpec& s) {
  auto cfg = s.parareal_config(1);
  const auto run = run_parareal(*s.problem, cfg, s.problem->initial());
  REQUIRE_FALSE(run.aborted);
  const auto seq = sequential_fine(*cfg.fine, s.problem->initial(), s.H, s.N());
  for (int k = 0; k <= run.completed; ++k)
    for (int n = 0; n <= std::min(k, s.N()); ++n) {
      CAPTURE(k);
      CAPTURE(n);
      CHECK(bitwise_equal(run.states[k][n], seq[n]));
    }
}

ProblemPtr exponential() {
  ProblemDefinition d;
  d.name = "exponential";
  d.dim = 1;
  d.epsilon = 0.5;
  d.horizon = 2.0;
  d.initial = make_state({1.0});
  d.fast = [](const State& u) { return State(State::Zero(u.size())); };
  d.slow = [](double, const State& u) { return u; };
  d.exact_flow = [](const State& u, double, double dt) { return State(u * std::exp(dt)); };
  d.analytic = [](double t) { return make_state({std::exp(t)}); };
  return std::make_shared<const OdeProblem>(d);
}

struct EulerCoarse : FlowMap {
  State propagate(const State& u, double, double dt, StepCounter*) const override { return u * (1.0 + dt); }
};

}  // namespace

TEST_SUITE("parareal") {

TEST_CASE("exactness prefix is bitwise in every mode") {
  for (PararealMode m : {PararealMode::naive, PararealMode::slow_only, PararealMode::full_state}) {
    CAPTURE(static_cast<int>(m));
    check_prefix(short_spiral2(m));
  }
}

TEST_CASE("worker count does not change the run") {
  const auto s = short_spiral2(PararealMode::full_state);
  const auto a = run_parareal(*s.problem, s.parareal_config(1), s.problem->initial());
  for (int w : {2, 4}) {
    const auto b = run_parareal(*s.problem, s.parareal_config(w), s.problem->initial());
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k)
      for (std::size_t n = 0; n < a.states[k].size(); ++n) CHECK(bitwise_equal(a.states[k][n], b.states[k][n]));
    for (std::size_t k = 0; k < a.cost.size(); ++k) {
      CHECK(a.cost[k].fine_steps == b.cost[k].fine_steps);
      CHECK(a.cost[k].alignment_steps == b.cost[k].alignment_steps);
    }
  }
}

TEST_CASE("coarse equal to fine converges in one iteration") {
  auto s = short_spiral2(PararealMode::naive);
  auto cfg = s.parareal_config(1);
  cfg.coarse = cfg.fine;
  const auto run = run_parareal(*s.problem, cfg, s.problem->initial());
  const auto seq = sequential_fine(*cfg.fine, s.problem->initial(), s.H, s.N());
  for (int k = 0; k <= 1; ++k) CHECK(state_distance(run.states[k], seq) < 1e-12);
}

TEST_CASE("fine trajectory is a fixed point") {
  for (PararealMode m : {PararealMode::naive, PararealMode::slow_only, PararealMode::full_state}) {
    auto s = short_spiral2(m);
    s.K = 2;
    auto cfg = s.parareal_config(1);
    cfg.coarse = cfg.fine;
    const auto run = run_parareal(*s.problem, cfg, s.problem->initial());
    const auto seq = sequential_fine(*cfg.fine, s.problem->initial(), s.H, s.N());
    CAPTURE(static_cast<int>(m));
    const double tol = m == PararealMode::naive ? 1e-12 : 10 * s.problem->epsilon();
    CHECK(state_distance(run.states[2], seq) < tol);
  }
}

TEST_CASE("generic driver agrees with the closed-form Table 1 counter") {
  auto s = make_problem("simple_spiral", 0.2);
  const double H = 0.2 / 5;
  PararealConfig cfg;
  cfg.T = 10.0;
  cfg.H = H;
  cfg.N = 250;
  cfg.K = 20;
  cfg.mode = PararealMode::naive;
  cfg.fine = std::make_shared<ExactFlow>(s.problem);
  cfg.coarse = std::make_shared<LinearSpiralCoarse>(0.1, 0.2, ClassicalCoarse::explicit_euler);
  const auto run = run_parareal(*s.problem, cfg, s.problem->initial());
  std::vector<double> grid;
  for (int n = 0; n <= cfg.N; ++n) grid.push_back(n * H);
  const auto err = state_sup_error(run, reference_trajectory(s, grid, std::nullopt));
  const int k = iterations_to_tolerance(err, 0.1, cfg.N);
  REQUIRE(k >= 1);
  REQUIRE(k <= cfg.K);
  CHECK(k == naive_spiral_iterations(ClassicalCoarse::explicit_euler, 0.2, H));
  CHECK(err[k] < 0.1);
  CHECK(err[k - 1] >= 0.1);
  const auto stream = naive_spiral_errors(ClassicalCoarse::explicit_euler, 0.2, H, cfg.K);
  for (int j = 0; j <= cfg.K; ++j) CHECK(std::abs(stream[j] - err[j]) < 1e-9);
}

TEST_CASE("naive parareal converges geometrically on a non-stiff problem") {
  auto p = exponential();
  PararealConfig cfg;
  cfg.T = 2.0;
  cfg.H = 0.1;
  cfg.N = 20;
  cfg.K = 6;
  cfg.fine = std::make_shared<ExactFlow>(p);
  cfg.coarse = std::make_shared<EulerCoarse>();
  const auto run = run_naive(*p, cfg, p->initial());
  std::vector<State> ref;
  for (int n = 0; n <= cfg.N; ++n) ref.push_back(p->analytic(n * cfg.H));
  const auto err = state_sup_error(run, ref);
  for (int k = 1; k <= 4; ++k) {
    CAPTURE(k);
    CHECK(err[k] <= 0.1 * err[k - 1]);
  }
}

TEST_CASE("naive parareal stalls on the oscillatory spiral with a large step") {
  for (ClassicalCoarse m : {ClassicalCoarse::explicit_euler, ClassicalCoarse::implicit_euler,
                            ClassicalCoarse::trapezoidal}) {
    const auto err = naive_spiral_errors(m, 1e-3, 0.1, 5);
    REQUIRE(err.size() == 6u);
    CHECK(err[5] >= 0.1);
  }
}

TEST_CASE("resonance windows bypass intersecting segments") {
  PararealConfig cfg;
  cfg.H = 0.25;
  cfg.resonance_windows = {{4.25, 4.75}};
  CHECK(cfg.bypassed(17));
  CHECK(cfg.bypassed(18));
  CHECK(cfg.bypassed(19));
  CHECK(cfg.bypassed(20));
  CHECK_FALSE(cfg.bypassed(16));
  CHECK_FALSE(cfg.bypassed(21));
}

TEST_CASE("early stop on stagnation") {
  auto s = short_spiral2(PararealMode::naive);
  s.K = 6;
  s.stop_tolerance = 1e300;
  const auto run = run_parareal(*s.problem, s.parareal_config(1), s.problem->initial());
  CHECK(run.completed == 1);
  CHECK(run.states.size() == 2u);
}

TEST_CASE("alignment failure aborts unless fallback is requested") {
  auto s = short_spiral2(PararealMode::slow_only);
  s.alignment.max_window = s.alignment.initial_eta;
  s.alignment.initial_eta = s.problem->epsilon() / 10;
  s.alignment.max_window = s.problem->epsilon() / 10;
  set_alignment_warnings(false);
  const auto aborted = run_parareal(*s.problem, s.parareal_config(1), s.problem->initial());
  CHECK(aborted.aborted);
  CHECK(aborted.completed == 0);
  CHECK(aborted.abort_reason.find("iteration 1") != std::string::npos);
  s.on_alignment_failure = AlignmentFailurePolicy::naive_correction;
  const auto fallback = run_parareal(*s.problem, s.parareal_config(1), s.problem->initial());
  CHECK_FALSE(fallback.aborted);
  CHECK(fallback.cost[1].alignment_fallbacks > 0);
}

TEST_CASE("invalid configurations are rejected") {
  auto s = short_spiral2(PararealMode::naive);
  auto cfg = s.parareal_config(1);
  cfg.K = cfg.N + 1;
  CHECK_THROWS_AS(run_parareal(*s.problem, cfg, s.problem->initial()), ConfigurationError);
  cfg = s.parareal_config(1);
  cfg.N = 7;
  CHECK_THROWS_AS(run_parareal(*s.problem, cfg, s.problem->initial()), ConfigurationError);
}

TEST_CASE("ideal speed-up limit") {
  CostModel m{2.0, 0.1, 1e-5, 0.0, 1e-4, std::numeric_limits<double>::infinity()};
  const auto e = speedup_estimate(m, 2);
  CHECK(e.tau == doctest::Approx(0.1));
  CHECK(e.speedup == doctest::Approx(10.0));
}

TEST_CASE("speed-up formula with the spiral I parameters") {
  const double eps = 1e-3;
  CostModel m{2.0, 0.1, eps / 200, 7 * eps, eps / 10, eps / 100};
  const auto e = speedup_estimate(m, 2);
  // 0.1 + 5e-6 * 7e-3 * (4e4 + 1e5) * 21
  CHECK(e.tau == doctest::Approx(0.2029).epsilon(1e-9));
  CHECK(e.speedup == doctest::Approx(2.0 / (2 * 0.2029)).epsilon(1e-9));
}

TEST_CASE("measured fine and coarse ledgers match the model terms") {
  auto s = make_problem("spiral1", 1e-3);
  s.K = 1;
  s.fine = FineConfig{FineMethod::rk4, s.h_fine, 1e-13, 1e-11};
  s.poincare.micro = FineConfig{FineMethod::rk4, s.h_poincare, 1e-13, 1e-11};
  const auto run = run_parareal(*s.problem, s.parareal_config(1), s.problem->initial());
  REQUIRE_FALSE(run.aborted);
  const auto per_force = static_cast<std::uint64_t>(std::lround(4 * s.poincare.eta / s.h_poincare));
  // midpoint macro: two force evaluations per coarse step
  CHECK(run.cost[0].coarse_steps == static_cast<std::uint64_t>(s.N()) * 2 * per_force);
  CHECK(run.cost[1].fine_steps_max_segment == static_cast<std::uint64_t>(std::lround(s.H / s.h_fine)));
  CHECK(measured_tau(run.cost[0], s.h_fine) ==
        doctest::Approx(s.h_fine * static_cast<double>(run.cost[0].coarse_steps)));
}

}
