#include "osc_parareal/problem.hpp"

#include <sstream>

namespace osc {

OdeProblem::OdeProblem(ProblemDefinition def) : def_(std::move(def)) {
  if (def_.dim <= 0) throw ConfigurationError("problem dimension must be positive");
  if (!(def_.epsilon > 0.0 && def_.epsilon < 1.0))
    throw ConfigurationError("epsilon must lie in (0,1)");
  if (!def_.fast || !def_.slow) throw ConfigurationError("problem needs both fast and slow parts");
  if (def_.initial.size() != def_.dim)
    throw ConfigurationError("initial state dimension mismatch");
  State probe = rhs(RhsKind::full, 0.0, def_.initial);
  if (def_.alignment && def_.alignment(0.0, def_.initial).size() != probe.size())
    throw ConfigurationError("alignment rhs dimension differs from full rhs");
  if (def_.observables) {
    if (!def_.observables->fn) throw ConfigurationError("empty slow observable function");
    auto xi = def_.observables->fn(def_.initial);
    if (xi.size() != def_.observables->dim || def_.observables->dim >= def_.dim)
      throw ConfigurationError("slow observables must have fixed dimension m < d");
  }
  if (def_.partition) {
    const auto& p = *def_.partition;
    if (p.positions.size() != p.velocities.size() ||
        p.positions.size() + p.velocities.size() != static_cast<std::size_t>(def_.dim))
      throw ConfigurationError("partition must split the state into equal halves");
  }
}

void OdeProblem::check_dim(const State& u) const {
  if (u.size() != def_.dim) {
    std::ostringstream os;
    os << def_.name << ": state dimension " << u.size() << " != " << def_.dim;
    throw ConfigurationError(os.str());
  }
}

State OdeProblem::fast_part(const State& u) const {
  check_dim(u);
  return def_.fast(u);
}

State OdeProblem::slow_part(double t, const State& u) const {
  check_dim(u);
  return def_.slow(t, u);
}

State OdeProblem::rhs(RhsKind kind, double t, const State& u) const {
  check_dim(u);
  switch (kind) {
    case RhsKind::unperturbed:
      return def_.fast(u) / def_.epsilon;
    case RhsKind::alignment:
      if (def_.alignment) return def_.alignment(t, u);
      [[fallthrough]];
    case RhsKind::full:
      break;
  }
  State du = def_.fast(u) / def_.epsilon;
  du += def_.slow(t, u);
  return du;
}

State OdeProblem::analytic(double t) const {
  if (!def_.analytic) throw UnsupportedError(def_.name + " has no analytic solution");
  return def_.analytic(t);
}

State OdeProblem::exact_flow(const State& u, double t0, double dt) const {
  if (!def_.exact_flow) throw UnsupportedError(def_.name + " has no exact flow");
  check_dim(u);
  return def_.exact_flow(u, t0, dt);
}

State eval_full_rhs(const OdeProblem& problem, double t, const State& u) {
  return problem.rhs(RhsKind::full, t, u);
}

State eval_alignment_rhs(const OdeProblem& problem, double t, const State& u) {
  return problem.rhs(RhsKind::alignment, t, u);
}

State eval_unperturbed_rhs(const OdeProblem& problem, double t, const State& u) {
  return problem.rhs(RhsKind::unperturbed, t, u);
}

Eigen::VectorXd observe_slow(const OdeProblem& problem, const State& u) {
  const auto& obs = problem.observables();
  if (!obs) throw UnsupportedError(problem.name() + ": no slow observables registered");
  if (u.size() != problem.dim()) throw ConfigurationError("state dimension mismatch");
  return obs->fn(u);
}

}  // namespace osc
