#pragma once

#include <cstdint>

#include "osc_parareal/flow.hpp"
#include "osc_parareal/problem.hpp"

namespace osc {

struct AlignmentConfig {
  double h_phase = 0.0;      // initial scan step
  RhsKind rhs = RhsKind::full;
  double initial_eta = 0.0;  // first scan window
  double tol_factor = 0.0;   // absolute bound on minimizer movement between halvings
  double max_window = 0.0;
  // A minimum is skipped when J exceeds reject_ratio * (best interior minimum)
  // or depth_ratio * (largest J in the window).
  double reject_ratio = 4.0;
  double depth_ratio = 0.25;
  int max_halvings = 16;

  static AlignmentConfig defaults(double epsilon);
  void validate() const;
};

struct MinimumHit {
  double t = 0.0;  // signed
  State state;     // F_t u0
  double h = 0.0;  // grid step at acceptance
};

struct MinimaPair {
  MinimumHit plus;
  MinimumHit minus;
  bool origin = false;  // one side was replaced by a minimum at t = 0
  std::uint64_t cost = 0;
};

struct AlignmentResult {
  double t_plus = 0.0;
  double t_minus = 0.0;
  double lambda_plus = 1.0;
  double lambda_minus = 0.0;
  State aligned_state;
  std::uint64_t scan_cost = 0;
};

// First interior minima of J(t) = |F_t u0 - v0|^2 forward and backward of t0.
// With include_origin, a minimum of J at t = 0 itself takes the place of the
// interior minimum on the side its refined time falls.
MinimaPair scan_minima(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0, const State& v0,
                       double t0 = 0.0, bool include_origin = true);

struct ShiftPair {
  double t_plus;
  double t_minus;
};
ShiftPair scan_first_minima(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0,
                            const State& v0, double t0 = 0.0);

// Signed-form convex weights; (1,0) when the two times nearly coincide.
std::pair<double, double> alignment_weights(double t_plus, double t_minus, double h_phase);

AlignmentResult local_align(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0,
                            const State& v0, double t0 = 0.0, StepCounter* cost = nullptr);

// u1 = F_H u0 is the fine image at time t1.
State forward_align_basic(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u1, const State& u0,
                          const State& v0, double t0 = 0.0, double t1 = 0.0, StepCounter* cost = nullptr);
State forward_align_improved(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u1,
                             const State& u0, const State& v0, double t0 = 0.0, double t1 = 0.0,
                             StepCounter* cost = nullptr);

// Set to false to silence fallback warnings.
void set_alignment_warnings(bool enabled);
bool alignment_warnings();

}  // namespace osc
