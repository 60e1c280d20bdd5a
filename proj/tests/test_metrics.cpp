#include <doctest.h>

#include <cmath>

#include <osc_parareal/metrics.hpp>
#include <osc_parareal/problems.hpp>
#include <osc_parareal/table1.hpp>

using namespace osc;

namespace {

PararealRun run_of(std::vector<std::vector<State>> states) {
  PararealRun r;
  r.states = std::move(states);
  r.completed = static_cast<int>(r.states.size()) - 1;
  return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("errors vanish on the reference") {
  auto s = make_problem("spiral2", 1e-3);
  const auto ref = reference_trajectory(s, s.grid(), std::nullopt);
  const auto run = run_of({ref, ref});
  for (double e : state_sup_error(run, ref)) CHECK(e == 0.0);
  for (double e : slow_sup_error(run, ref, *s.problem)) CHECK(e == 0.0);
}

TEST_CASE("norms are symmetric and use the largest node") {
  auto s = make_problem("spiral2", 1e-3);
  std::vector<State> a{make_state({1, 0, 0, 1}), make_state({0, 1, 0.5, 0.9})};
  std::vector<State> b{make_state({1, 0, 0, 1}), make_state({0, 1.5, 0.5, 0.7})};
  CHECK(state_distance(a, b) == doctest::Approx(std::hypot(0.5, 0.2)));
  CHECK(state_distance(a, b) == state_distance(b, a));
  CHECK(slow_distance(a, b, *s.problem) == doctest::Approx(1.25));
  CHECK(slow_distance(a, b, *s.problem) == slow_distance(b, a, *s.problem));
}

TEST_CASE("slow error needs observables") {
  ProblemDefinition d;
  d.name = "bare";
  d.dim = 1;
  d.epsilon = 0.5;
  d.initial = make_state({1.0});
  d.fast = [](const State& u) { return u; };
  d.slow = [](double, const State& u) { return u; };
  OdeProblem p(d);
  const std::vector<State> ref{make_state({1.0})};
  CHECK_THROWS_AS(slow_sup_error(run_of({ref}), ref, p), UnsupportedError);
}

TEST_CASE("mismatched grids are rejected") {
  std::vector<State> a{make_state({1.0})}, b{make_state({1.0}), make_state({2.0})};
  CHECK_THROWS_AS(state_distance(a, b), ConfigurationError);
}

TEST_CASE("iterations to tolerance") {
  CHECK(iterations_to_tolerance({0.01, 0.5}, 0.1, 9) == 0);
  CHECK(iterations_to_tolerance({1.0, 0.5, 0.09}, 0.1, 9) == 2);
  CHECK(iterations_to_tolerance({1.0, 0.5, 0.1}, 0.1, 9) == 9);
  CHECK_THROWS(iterations_to_tolerance({1.0}, 0.0, 9));
}

TEST_CASE("Table 1 single entries") {
  CHECK(naive_spiral_iterations(ClassicalCoarse::implicit_euler, 0.05, 0.1) == 93);
  CHECK(naive_spiral_iterations(ClassicalCoarse::implicit_euler, 0.2, 0.1) == 18);
}

TEST_CASE("order fit") {
  const std::vector<double> xs{0.4, 0.2, 0.1, 0.05};
  std::vector<double> lin, quad;
  for (double x : xs) {
    lin.push_back(x);
    quad.push_back(3.0 * x * x);
  }
  CHECK(fit_order(xs, lin) == doctest::Approx(1.0));
  CHECK(fit_order(xs, quad) == doctest::Approx(2.0));
  CHECK_THROWS(fit_order({0.1, 0.2}, {1.0, 2.0}));
  CHECK_THROWS(fit_order({0.1, 0.2, 0.3}, {1.0, -2.0, 3.0}));
}

TEST_CASE("error series layout") {
  auto s = make_problem("spiral2", 5e-3);
  s.T = 0.4;
  s.K = 2;
  const auto run = run_parareal(*s.problem, s.parareal_config(1), s.problem->initial());
  const auto es = error_series(run, reference_trajectory(s, s.grid(), std::nullopt), *s.problem);
  CHECK(es.state_sup_error.size() == 3u);
  CHECK(es.slow_sup_error.size() == 3u);
  REQUIRE(es.node_state_error.size() == 3u);
  CHECK(es.node_state_error[0].size() == static_cast<std::size_t>(s.N() + 1));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(es.state_sup_error[k] >= 0.0);
    CHECK(*std::max_element(es.node_state_error[k].begin(), es.node_state_error[k].end()) ==
          es.state_sup_error[k]);
  }
}

}
