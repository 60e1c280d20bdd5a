#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "osc_parareal/flow.hpp"
#include "osc_parareal/kernels.hpp"
#include "osc_parareal/problem.hpp"

namespace osc {

enum class FineMethod { rk4, adaptive54, verlet, exact };

struct FineConfig {
  FineMethod method = FineMethod::rk4;
  double h = 0.0;  // step for rk4/verlet, initial step guess for adaptive54
  double rtol = 1e-10;
  double atol = 1e-12;

  void validate() const;
};

using Rhs = std::function<State(double t, const State& u)>;

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<State> states;
};

// Generic engines over an arbitrary right-hand side.
State rk4_integrate(const Rhs& f, State u, double t0, double dt, double h, StepCounter* cost = nullptr,
                    TrajectoryRecord* record = nullptr);
State rk4_step(const Rhs& f, const State& u, double t, double h);
State dopri_integrate(const Rhs& f, State u, double t0, double dt, double rtol, double atol,
                      double h_init, double floor_scale, StepCounter* cost = nullptr);
State verlet_integrate(const Rhs& f, const PartitionSplit& split, State u, double t0, double dt, double h,
                       StepCounter* cost = nullptr);

State propagate_fixed(const OdeProblem& problem, RhsKind kind, const State& u, double t0, double dt,
                      double h, StepCounter* cost = nullptr, TrajectoryRecord* record = nullptr);
State propagate_adaptive(const OdeProblem& problem, RhsKind kind, const State& u, double t0, double dt,
                         double rtol, double atol, StepCounter* cost = nullptr, double h_init = 0.0);
State propagate_verlet(const OdeProblem& problem, const State& u, double t0, double dt, double h,
                       StepCounter* cost = nullptr, RhsKind kind = RhsKind::full);
State propagate_exact(const OdeProblem& problem, const State& u, double t0, double dt,
                      StepCounter* cost = nullptr);
State propagate_with(const OdeProblem& problem, RhsKind kind, const FineConfig& cfg, const State& u,
                     double t0, double dt, StepCounter* cost = nullptr);

// Filtered equation on [tstar, tstar+eta] (eta < 0: backward over [tstar+eta, tstar]);
// only f0 is weighted, by k(|t - tstar| / |eta|).
State propagate_filtered(const OdeProblem& problem, const FilterKernel& kernel, const State& u, double tstar,
                         double eta, const FineConfig& micro, StepCounter* cost = nullptr);

class FineFlow : public FlowMap {
 public:
  FineFlow(ProblemPtr problem, FineConfig cfg, RhsKind kind = RhsKind::full);
  State propagate(const State& u, double t0, double dt, StepCounter* cost = nullptr) const override;
  const FineConfig& config() const { return cfg_; }
  const OdeProblem& problem() const { return *problem_; }

 private:
  ProblemPtr problem_;
  FineConfig cfg_;
  RhsKind kind_;
};

}  // namespace osc
