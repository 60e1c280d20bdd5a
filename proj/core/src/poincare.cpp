#include "osc_parareal/poincare.hpp"

#include <cmath>

namespace osc {

namespace {

State unperturbed(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t, double dt,
                  StepCounter* cost) {
  return propagate_with(problem, RhsKind::unperturbed, cfg.micro, u, t, dt, cost);
}

State filtered(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t, double dt,
               StepCounter* cost) {
  return propagate_filtered(problem, cfg.kernel, u, t, dt, cfg.micro, cost);
}

}  // namespace

void PoincareConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigurationError("poincare: eta must be positive");
  if (micro.method == FineMethod::exact) throw ConfigurationError("poincare: micro solver cannot be exact");
  micro.validate();
}

State force_fe_chord(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t,
                     StepCounter* cost) {
  const State full = filtered(problem, cfg, u, t, cfg.eta, cost);
  const State free = unperturbed(problem, cfg, u, t, cfg.eta, cost);
  return (full - free) / cfg.eta;
}

State force_z_symmetric(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t,
                        StepCounter* cost) {
  const double eta = cfg.eta;
  const State fwd = filtered(problem, cfg, u, t, eta, cost);
  const State g1 = unperturbed(problem, cfg, fwd, t + eta, -eta, cost);
  const State bwd = filtered(problem, cfg, u, t, -eta, cost);
  const State gm1 = unperturbed(problem, cfg, bwd, t - eta, eta, cost);
  return (g1 - gm1) / (2.0 * eta);
}

State poincare_force(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t,
                     StepCounter* cost) {
  return cfg.estimator == Estimator::fe_chord ? force_fe_chord(problem, cfg, u, t, cost)
                                              : force_z_symmetric(problem, cfg, u, t, cost);
}

State poincare_step(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t, double H,
                    StepCounter* cost) {
  if (!(std::abs(H) > 2.0 * cfg.eta)) throw ConfigurationError("poincare: macro step must exceed 2 eta");
  if (cfg.macro == MacroStepper::verlet) {
    const auto& split = problem.partition();
    if (!split) throw UnsupportedError("poincare: verlet macro stepper needs a partitioned problem");
    State v = u;
    const State a = poincare_force(problem, cfg, v, t, cost);
    for (int i : split->positions) v[i] += 0.5 * H * a[i];
    const State b = poincare_force(problem, cfg, v, t + 0.5 * H, cost);
    for (int i : split->velocities) v[i] += H * b[i];
    const State c = poincare_force(problem, cfg, v, t + 0.5 * H, cost);
    for (int i : split->positions) v[i] += 0.5 * H * c[i];
    return v;
  }
  if (cfg.macro == MacroStepper::midpoint) {
    const State mid = u + 0.5 * H * poincare_force(problem, cfg, u, t, cost);
    return u + H * poincare_force(problem, cfg, mid, t + 0.5 * H, cost);
  }
  const double eta = cfg.eta;
  if (cfg.estimator == Estimator::z_symmetric) {
    // one-sided stencil: gamma_-1 = F0_eta u, gamma_1 = F0_{-eta} F_{2 eta} u
    const State gm1 = unperturbed(problem, cfg, u, t, eta, cost);
    const State far = filtered(problem, cfg, u, t, 2.0 * eta, cost);
    const State g1 = unperturbed(problem, cfg, far, t + 2.0 * eta, -eta, cost);
    return gm1 + (H / (2.0 * eta)) * (g1 - gm1);
  }
  const State full = filtered(problem, cfg, u, t, eta, cost);
  const State free = unperturbed(problem, cfg, u, t, eta, cost);
  return free + (H / eta) * (full - free);
}

PoincareFlow::PoincareFlow(ProblemPtr problem, PoincareConfig cfg)
    : problem_(std::move(problem)), cfg_(std::move(cfg)) {
  if (!problem_) throw ConfigurationError("poincare flow needs a problem");
  cfg_.validate();
}

State PoincareFlow::propagate(const State& u, double t0, double dt, StepCounter* cost) const {
  if (dt == 0.0) return u;
  return poincare_step(*problem_, cfg_, u, t0, dt, cost);
}

}  // namespace osc
