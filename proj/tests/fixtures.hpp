#pragma once

#include <cmath>
#include <memory>

#include <osc_parareal/problem.hpp>

namespace osc::testing {

// x' = -y/eps, y' = x/eps; no perturbation.
inline ProblemPtr rotation(double eps) {
  ProblemDefinition d;
  d.name = "rotation";
  d.dim = 2;
  d.epsilon = eps;
  d.horizon = 1.0;
  d.initial = make_state({1.0, 0.0});
  d.fast = [](const State& u) { return make_state({-u[1], u[0]}); };
  d.slow = [](double, const State& u) { return State(State::Zero(u.size())); };
  d.observables = SlowObservables{[](const State& u) { return make_state({u.norm()}); }, 1};
  d.exact_flow = [eps](const State& u, double, double dt) {
    const double c = std::cos(dt / eps), s = std::sin(dt / eps);
    return make_state({c * u[0] - s * u[1], s * u[0] + c * u[1]});
  };
  return std::make_shared<const OdeProblem>(d);
}

// Position/velocity pair q' = p/eps, p' = -q/eps.
inline ProblemPtr oscillator(double eps) {
  ProblemDefinition d;
  d.name = "oscillator";
  d.dim = 2;
  d.epsilon = eps;
  d.horizon = 1.0;
  d.initial = make_state({1.0, 0.0});
  d.fast = [](const State& u) { return make_state({u[1], -u[0]}); };
  d.slow = [](double, const State& u) { return State(State::Zero(u.size())); };
  d.observables = SlowObservables{[](const State& u) { return make_state({u.squaredNorm()}); }, 1};
  d.exact_flow = [eps](const State& u, double, double dt) {
    const double c = std::cos(dt / eps), s = std::sin(dt / eps);
    return make_state({c * u[0] + s * u[1], -s * u[0] + c * u[1]});
  };
  d.partition = PartitionSplit{{0}, {1}};
  return std::make_shared<const OdeProblem>(d);
}

}  // namespace osc::testing
