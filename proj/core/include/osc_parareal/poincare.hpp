#pragma once

#include "osc_parareal/flow.hpp"
#include "osc_parareal/integrators.hpp"
#include "osc_parareal/kernels.hpp"
#include "osc_parareal/problem.hpp"

namespace osc {

enum class Estimator { fe_chord, z_symmetric };
// verlet: drift-kick-drift over the problem's position/velocity split.
enum class MacroStepper { forward_euler, midpoint, verlet };

struct PoincareConfig {
  double eta = 0.0;
  FineConfig micro;
  FilterKernel kernel;
  Estimator estimator = Estimator::z_symmetric;
  MacroStepper macro = MacroStepper::midpoint;

  void validate() const;
};

// (F_eta u - F0_eta u) / eta
State force_fe_chord(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t = 0.0,
                     StepCounter* cost = nullptr);
// (F0_{-eta} F_eta u - F0_eta F_{-eta} u) / (2 eta)
State force_z_symmetric(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t = 0.0,
                        StepCounter* cost = nullptr);
State poincare_force(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t = 0.0,
                     StepCounter* cost = nullptr);

State poincare_step(const OdeProblem& problem, const PoincareConfig& cfg, const State& u, double t, double H,
                    StepCounter* cost = nullptr);

class PoincareFlow : public FlowMap {
 public:
  PoincareFlow(ProblemPtr problem, PoincareConfig cfg);
  State propagate(const State& u, double t0, double dt, StepCounter* cost = nullptr) const override;
  const PoincareConfig& config() const { return cfg_; }

 private:
  ProblemPtr problem_;
  PoincareConfig cfg_;
};

}  // namespace osc
