#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osc_parareal/state.hpp"

namespace osc {

// full: eps^-1 f1 + f0.  alignment: registered alignment system, else full.
// unperturbed: eps^-1 f1 only.
enum class RhsKind { full, alignment, unperturbed };

using VectorField = std::function<State(double t, const State& u)>;
using FastField = std::function<State(const State& u)>;
using Observable = std::function<Eigen::VectorXd(const State& u)>;
using Trajectory = std::function<State(double t)>;
using ExactFlowFn = std::function<State(const State& u, double t0, double dt)>;

// q' depends only on the velocity block, p' only on the position block.
struct PartitionSplit {
  std::vector<int> positions;
  std::vector<int> velocities;
};

struct SlowObservables {
  Observable fn;
  int dim = 0;
  // Diagnostics only. Solver code never reads these.
  bool diagnostic_only = true;
};

struct ProblemDefinition {
  std::string name;
  int dim = 0;
  double epsilon = 0.0;
  double horizon = 0.0;
  State initial;
  FastField fast;
  VectorField slow;
  VectorField alignment;
  std::optional<SlowObservables> observables;
  Trajectory analytic;
  ExactFlowFn exact_flow;
  std::optional<PartitionSplit> partition;
};

class OdeProblem {
 public:
  explicit OdeProblem(ProblemDefinition def);

  const std::string& name() const { return def_.name; }
  int dim() const { return def_.dim; }
  double epsilon() const { return def_.epsilon; }
  double horizon() const { return def_.horizon; }
  const State& initial() const { return def_.initial; }

  bool has_alignment_rhs() const { return static_cast<bool>(def_.alignment); }
  bool has_observables() const { return def_.observables.has_value(); }
  bool has_analytic() const { return static_cast<bool>(def_.analytic); }
  bool has_exact_flow() const { return static_cast<bool>(def_.exact_flow); }
  const std::optional<PartitionSplit>& partition() const { return def_.partition; }
  int slow_dim() const { return def_.observables ? def_.observables->dim : 0; }

  State rhs(RhsKind kind, double t, const State& u) const;
  State fast_part(const State& u) const;
  State slow_part(double t, const State& u) const;
  State analytic(double t) const;
  State exact_flow(const State& u, double t0, double dt) const;

  // Raw observables; reached through observe_slow().
  const std::optional<SlowObservables>& observables() const { return def_.observables; }

 private:
  void check_dim(const State& u) const;
  ProblemDefinition def_;
};

using ProblemPtr = std::shared_ptr<const OdeProblem>;

State eval_full_rhs(const OdeProblem& problem, double t, const State& u);
State eval_alignment_rhs(const OdeProblem& problem, double t, const State& u);
State eval_unperturbed_rhs(const OdeProblem& problem, double t, const State& u);

// Diagnostic slow variables. Throws UnsupportedError when none are registered.
Eigen::VectorXd observe_slow(const OdeProblem& problem, const State& u);

}  // namespace osc
