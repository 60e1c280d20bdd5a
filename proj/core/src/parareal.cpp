#include "osc_parareal/parareal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "osc_parareal/parallel.hpp"

namespace osc {

namespace {

using Clock = std::chrono::steady_clock;

bool same(const State& a, const State& b) { return a.size() == b.size() && (a.array() == b.array()).all(); }

double sup_diff(const std::vector<State>& a, const std::vector<State>& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, (a[n] - b[n]).norm());
  return m;
}

struct Driver {
  const OdeProblem& problem;
  const PararealConfig& cfg;
  PararealRun run;
  // coarse image of states[k-1][n-1], kept from the previous sweep
  std::vector<State> coarse_prev;

  Driver(const OdeProblem& p, const PararealConfig& c) : problem(p), cfg(c) {}

  double t(int n) const { return n * cfg.H; }

  State coarse(const State& u, int n, IterationCost& ic) const {
    StepCounter c;
    State out = cfg.coarse->propagate(u, t(n - 1), cfg.H, &c);
    ic.coarse_steps += c.steps;
    return out;
  }

  void zeroth(const State& u0) {
    const auto start = Clock::now();
    IterationCost ic;
    std::vector<State> s(cfg.N + 1);
    coarse_prev.assign(cfg.N + 1, State());
    s[0] = u0;
    for (int n = 1; n <= cfg.N; ++n) {
      s[n] = coarse(s[n - 1], n, ic);
      coarse_prev[n] = s[n];
    }
    ic.wallclock = std::chrono::duration<double>(Clock::now() - start).count();
    run.states.push_back(std::move(s));
    run.fine_cache.emplace_back();
    run.cost.push_back(ic);
  }

  // F_H states[k-1][n-1] for n = k..N, concurrently.
  std::vector<State> fine_sweep(int k, IterationCost& ic) const {
    const auto& prev = run.states[k - 1];
    std::vector<State> out(cfg.N + 1);
    std::vector<StepCounter> counters(cfg.N + 1);
    const std::size_t count = static_cast<std::size_t>(cfg.N - k + 1);
    parallel_for(count, cfg.workers, [&](std::size_t i) {
      const int n = k + static_cast<int>(i);
      out[n] = cfg.fine->propagate(prev[n - 1], t(n - 1), cfg.H, &counters[n]);
    });
    for (int n = k; n <= cfg.N; ++n) {
      ic.fine_steps += counters[n].steps;
      ic.fine_steps_max_segment = std::max(ic.fine_steps_max_segment, counters[n].steps);
    }
    return out;
  }

  State naive_update(const State& fine, const State& c_new, const State& c_old) const {
    return fine + (c_new - c_old);
  }

  State align_local(const State& u, const State& ref, int n, IterationCost& ic) const {
    StepCounter c;
    State out = local_align(problem, cfg.alignment, u, ref, t(n), &c).aligned_state;
    ic.alignment_steps += c.steps;
    return out;
  }

  State align_forward(const State& u1, const State& u0, const State& v0, int n, IterationCost& ic) const {
    StepCounter c;
    State out = cfg.forward_variant == ForwardVariant::improved
                    ? forward_align_improved(problem, cfg.alignment, u1, u0, v0, t(n - 1), t(n), &c)
                    : forward_align_basic(problem, cfg.alignment, u1, u0, v0, t(n - 1), t(n), &c);
    ic.alignment_steps += c.steps;
    return out;
  }

  // S0(a; ref) + ref - S0(b; ref)
  State aligned_correction(const State& a, const State& b, const State& ref, int n, IterationCost& ic) const {
    if (same(a, b)) return ref;
    return align_local(a, ref, n, ic) + ref - align_local(b, ref, n, ic);
  }

  bool handle_failure(const AlignmentFailure& e, int n, IterationCost& ic) const {
    if (cfg.on_alignment_failure == AlignmentFailurePolicy::abort) return false;
    ++ic.alignment_fallbacks;
    if (alignment_warnings())
      std::clog << "warning: alignment failed on segment " << n << " (" << e.what() << "), naive correction used\n";
    return true;
  }

  void iterate_naive(int k, IterationCost& ic) {
    auto fine = fine_sweep(k, ic);
    std::vector<State> s(run.states[k - 1].begin(), run.states[k - 1].begin() + k);
    s.resize(cfg.N + 1);
    for (int n = k; n <= cfg.N; ++n) {
      State c_new = n == k ? coarse_prev[n] : coarse(s[n - 1], n, ic);
      s[n] = naive_update(fine[n], c_new, coarse_prev[n]);
      coarse_prev[n] = std::move(c_new);
    }
    run.states.push_back(std::move(s));
    run.fine_cache.push_back(std::move(fine));
  }

  void iterate_slow(int k, IterationCost& ic) {
    auto fine = fine_sweep(k, ic);
    std::vector<State> s(run.states[k - 1].begin(), run.states[k - 1].begin() + k);
    s.resize(cfg.N + 1);
    for (int n = k; n <= cfg.N; ++n) {
      State c_new = n == k ? coarse_prev[n] : coarse(s[n - 1], n, ic);
      if (cfg.bypassed(n)) {
        s[n] = naive_update(fine[n], c_new, coarse_prev[n]);
      } else {
        try {
          s[n] = aligned_correction(c_new, coarse_prev[n], fine[n], n, ic);
        } catch (const AlignmentFailure& e) {
          if (!handle_failure(e, n, ic)) throw;
          s[n] = naive_update(fine[n], c_new, coarse_prev[n]);
        }
      }
      coarse_prev[n] = std::move(c_new);
    }
    run.states.push_back(std::move(s));
    run.fine_cache.push_back(std::move(fine));
  }

  void iterate_full(int k, IterationCost& ic) {
    auto fine = fine_sweep(k, ic);
    const auto& old = run.states[k - 1];
    // header: nodes before k are already fine-exact and carried over
    std::vector<State> s(old.begin(), old.begin() + k);
    s.resize(cfg.N + 1);
    State ref = s[k - 1];
    for (int n = k; n <= cfg.N; ++n) {
      State c_new = n == k ? coarse_prev[n] : coarse(s[n - 1], n, ic);
      const State& prev = old[n - 1];
      bool naive = cfg.bypassed(n);
      if (!naive) {
        try {
          if (same(prev, ref)) {
            // alignment of a state to itself is the identity
            s[n] = aligned_correction(c_new, coarse_prev[n], fine[n], n, ic);
          } else {
            const State prev_aligned = align_local(prev, ref, n - 1, ic);
            const State fine_aligned = align_forward(fine[n], prev, ref, n, ic);
            const State c_old = same(prev_aligned, s[n - 1]) ? c_new : coarse(prev_aligned, n, ic);
            s[n] = aligned_correction(c_new, c_old, fine_aligned, n, ic);
          }
        } catch (const AlignmentFailure& e) {
          if (!handle_failure(e, n, ic)) throw;
          naive = true;
        }
      }
      if (naive) s[n] = naive_update(fine[n], c_new, coarse_prev[n]);
      coarse_prev[n] = std::move(c_new);
      ref = s[n];
    }
    run.states.push_back(std::move(s));
    run.fine_cache.push_back(std::move(fine));
  }

  PararealRun execute(const State& u0) {
    cfg.validate();
    if (u0.size() != problem.dim()) throw ConfigurationError("initial state dimension mismatch");
    try {
      zeroth(u0);
    } catch (const Error& e) {
      run.aborted = true;
      run.abort_reason = std::string("iteration 0: ") + e.what();
      return std::move(run);
    }
    for (int k = 1; k <= cfg.K; ++k) {
      const auto start = Clock::now();
      IterationCost ic;
      try {
        switch (cfg.mode) {
          case PararealMode::naive:
            iterate_naive(k, ic);
            break;
          case PararealMode::slow_only:
            iterate_slow(k, ic);
            break;
          case PararealMode::full_state:
            iterate_full(k, ic);
            break;
        }
      } catch (const Error& e) {
        run.aborted = true;
        run.abort_reason = "iteration " + std::to_string(k) + ": " + e.what();
        break;
      }
      ic.wallclock = std::chrono::duration<double>(Clock::now() - start).count();
      run.cost.push_back(ic);
      run.completed = k;
      if (cfg.stop_tolerance && sup_diff(run.states[k], run.states[k - 1]) < *cfg.stop_tolerance) break;
    }
    return std::move(run);
  }
};

}  // namespace

void PararealConfig::validate() const {
  if (!(T > 0.0 && H > 0.0)) throw ConfigurationError("parareal: T and H must be positive");
  if (N <= 0 || std::abs(N * H - T) > 1e-9 * T) throw ConfigurationError("parareal: N*H must equal T");
  if (K < 0 || K > N) throw ConfigurationError("parareal: need 0 <= K <= N");
  if (!coarse || !fine) throw ConfigurationError("parareal: coarse and fine flows are required");
  if (mode != PararealMode::naive) alignment.validate();
  for (const auto& w : resonance_windows)
    if (!(w.begin <= w.end && w.begin >= 0.0 && w.end <= T))
      throw ConfigurationError("parareal: resonance windows must lie in [0,T]");
}

bool PararealConfig::bypassed(int n) const {
  const double a = (n - 1) * H, b = n * H;
  for (const auto& w : resonance_windows)
    if (a <= w.end && b >= w.begin) return true;
  return false;
}

PararealRun run_naive(const OdeProblem& problem, const PararealConfig& cfg, const State& u0) {
  PararealConfig c = cfg;
  c.mode = PararealMode::naive;
  return Driver(problem, c).execute(u0);
}

PararealRun run_slow(const OdeProblem& problem, const PararealConfig& cfg, const State& u0) {
  PararealConfig c = cfg;
  c.mode = PararealMode::slow_only;
  return Driver(problem, c).execute(u0);
}

PararealRun run_full(const OdeProblem& problem, const PararealConfig& cfg, const State& u0) {
  PararealConfig c = cfg;
  c.mode = PararealMode::full_state;
  return Driver(problem, c).execute(u0);
}

PararealRun run_parareal(const OdeProblem& problem, const PararealConfig& cfg, const State& u0) {
  return Driver(problem, cfg).execute(u0);
}

std::vector<State> sequential_fine(const FlowMap& fine, const State& u0, double H, int N, StepCounter* cost) {
  std::vector<State> out(N + 1);
  out[0] = u0;
  for (int n = 1; n <= N; ++n) out[n] = fine.propagate(out[n - 1], (n - 1) * H, H, cost);
  return out;
}

SpeedupEstimate speedup_estimate(const CostModel& m, int K) {
  if (!(m.T > 0 && m.H > 0 && m.h_fine > 0 && m.eta >= 0 && m.h_poincare > 0 && m.h_phase > 0) || K <= 0)
    throw ConfigurationError("speed-up model needs positive step sizes and K");
  const double phase_term = std::isinf(m.h_phase) ? 0.0 : 1.0 / m.h_phase;
  SpeedupEstimate e;
  e.tau = m.H + m.h_fine * m.eta * (4.0 / m.h_poincare + phase_term) * (1.0 + m.T / m.H);
  e.speedup = m.T / (K * e.tau);
  return e;
}

double measured_tau(const IterationCost& c, double h_fine) {
  return h_fine * static_cast<double>(c.fine_steps_max_segment + c.coarse_steps + c.alignment_steps);
}

}  // namespace osc
