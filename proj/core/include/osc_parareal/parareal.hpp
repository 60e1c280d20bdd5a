#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osc_parareal/alignment.hpp"
#include "osc_parareal/flow.hpp"
#include "osc_parareal/problem.hpp"

namespace osc {

enum class PararealMode { naive, slow_only, full_state };
enum class ForwardVariant { basic, improved };
enum class AlignmentFailurePolicy { abort, naive_correction };

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

struct PararealConfig {
  double T = 0.0;
  double H = 0.0;
  int N = 0;
  int K = 0;
  PararealMode mode = PararealMode::naive;
  std::shared_ptr<const FlowMap> coarse;
  std::shared_ptr<const FlowMap> fine;
  AlignmentConfig alignment;
  ForwardVariant forward_variant = ForwardVariant::improved;
  std::vector<TimeWindow> resonance_windows;
  AlignmentFailurePolicy on_alignment_failure = AlignmentFailurePolicy::abort;
  std::optional<double> stop_tolerance;
  int workers = 0;

  void validate() const;
  // Segment n spans [(n-1)H, nH].
  bool bypassed(int n) const;
};

struct IterationCost {
  std::uint64_t fine_steps = 0;
  std::uint64_t fine_steps_max_segment = 0;
  std::uint64_t coarse_steps = 0;
  std::uint64_t alignment_steps = 0;
  int alignment_fallbacks = 0;
  double wallclock = 0.0;
};

struct PararealRun {
  // states[k][n], k = 0..completed, n = 0..N
  std::vector<std::vector<State>> states;
  // fine_cache[k][n] = F_H states[k-1][n-1] for the segments run at iteration k
  std::vector<std::vector<State>> fine_cache;
  std::vector<IterationCost> cost;
  int completed = 0;
  bool aborted = false;
  std::string abort_reason;

  double node_time(int n, double H) const { return n * H; }
};

PararealRun run_naive(const OdeProblem& problem, const PararealConfig& cfg, const State& u0);
PararealRun run_slow(const OdeProblem& problem, const PararealConfig& cfg, const State& u0);
PararealRun run_full(const OdeProblem& problem, const PararealConfig& cfg, const State& u0);
PararealRun run_parareal(const OdeProblem& problem, const PararealConfig& cfg, const State& u0);

// Composition of fine segments, the trajectory parareal converges to.
std::vector<State> sequential_fine(const FlowMap& fine, const State& u0, double H, int N,
                                   StepCounter* cost = nullptr);

struct CostModel {
  double T = 0.0;
  double H = 0.0;
  double h_fine = 0.0;
  double eta = 0.0;
  double h_poincare = 0.0;
  double h_phase = 0.0;  // infinite disables the alignment term
};

struct SpeedupEstimate {
  double tau = 0.0;
  double speedup = 0.0;
};

// tau = H + h_fine eta (4/h_poincare + 1/h_phase)(1 + T/H), speed-up T/(K tau)
SpeedupEstimate speedup_estimate(const CostModel& model, int K);
// The same quantity from an instrumented iteration, in fine-time units.
double measured_tau(const IterationCost& cost, double h_fine);

}  // namespace osc
