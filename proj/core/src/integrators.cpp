#include "osc_parareal/integrators.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

namespace osc {

namespace {

void check_finite(const State& u, double t) {
  if (!u.allFinite()) {
    std::ostringstream os;
    os << "non-finite state at t=" << t;
    throw BlowUpError(os.str(), t);
  }
}

// Number of steps of size h covering |dt|, tolerant to rounding in dt/h.
long step_count(double adt, double h) {
  const double ratio = adt / h;
  long n = static_cast<long>(std::ceil(ratio));
  if (n > 1 && static_cast<double>(n - 1) >= ratio * (1.0 - 1e-12)) --n;
  return std::max<long>(n, 1);
}

double max_scaled_norm(const State& e, const State& y0, const State& y1, double rtol, double atol) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    m = std::max(m, std::abs(e[i]) / sk);
  }
  return m;
}

}  // namespace

void FineConfig::validate() const {
  if (method == FineMethod::exact) return;
  if (method == FineMethod::adaptive54) {
    if (!(rtol > 0.0 && atol > 0.0)) throw ConfigurationError("adaptive tolerances must be positive");
    if (h < 0.0) throw ConfigurationError("initial step must be non-negative");
    return;
  }
  if (!(h > 0.0)) throw ConfigurationError("step size must be positive");
}

State rk4_step(const Rhs& f, const State& u, double t, double h) {
  const double h2 = 0.5 * h;
  State k1 = f(t, u);
  State k2 = f(t + h2, u + h2 * k1);
  State k3 = f(t + h2, u + h2 * k2);
  State k4 = f(t + h, u + h * k3);
  return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

State rk4_integrate(const Rhs& f, State u, double t0, double dt, double h, StepCounter* cost,
                    TrajectoryRecord* record) {
  if (!(h > 0.0)) throw ConfigurationError("rk4 step must be positive");
  if (record) {
    record->times.assign(1, t0);
    record->states.assign(1, u);
  }
  if (dt == 0.0) return u;
  const long n = step_count(std::abs(dt), h);
  const double hs = dt > 0 ? h : -h;
  double last = dt - static_cast<double>(n - 1) * hs;
  if (std::abs(last - hs) <= 1e-12 * h) last = hs;
  if (record) {
    record->times.reserve(n + 1);
    record->states.reserve(n + 1);
  }
  for (long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * hs;
    const double step = (i + 1 == n) ? last : hs;
    u = rk4_step(f, u, t, step);
    check_finite(u, t + step);
    if (record) {
      record->times.push_back(i + 1 == n ? t0 + dt : t + step);
      record->states.push_back(u);
    }
  }
  if (cost) cost->add(static_cast<std::uint64_t>(n));
  return u;
}

State dopri_integrate(const Rhs& f, State y, double t0, double dt, double rtol, double atol, double h_init,
                      double floor_scale, StepCounter* cost) {
  if (dt == 0.0) return y;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0, beta = 0.04;
  static constexpr double expo1 = 0.2 - beta * 0.75;

  const double dir = dt > 0 ? 1.0 : -1.0;
  const double t_end = t0 + dt;
  double t = t0;
  State k1 = f(t, y);
  std::uint64_t steps = 0;

  double h;
  if (h_init > 0.0) {
    h = h_init;
  } else {
    double d0 = 0, d1 = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sk = atol + rtol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sk);
      d1 = std::max(d1, std::abs(k1[i]) / sk);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(dt));
    State y1 = y + dir * h0 * k1;
    State f1 = f(t + dir * h0, y1);
    double d2 = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sk = atol + rtol * std::abs(y[i]);
      d2 = std::max(d2, std::abs(f1[i] - k1[i]) / sk);
    }
    d2 /= h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min(h, std::abs(dt));

  double err_old = 1e-4;
  bool rejected = false;
  bool done = false;
  while (!done) {
    const double floor = std::max(floor_scale * DBL_EPSILON, 4.0 * DBL_EPSILON * std::abs(t));
    if (h < floor) {
      std::ostringstream os;
      os << "adaptive step underflow at t=" << t;
      throw StiffnessError(os.str(), t);
    }
    bool last = false;
    if ((t + dir * 1.01 * h - t_end) * dir >= 0.0) {
      h = std::abs(t_end - t);
      last = true;
    }
    const double hs = dir * h;
    State k2 = f(t + c2 * hs, y + hs * (a21 * k1));
    State k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    State k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    State k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    State k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    State y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = last ? t_end : t + hs;
    State k7 = f(t_new, y_new);
    ++steps;
    State e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = max_scaled_norm(e, y, y_new, rtol, atol);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      check_finite(y_new, t_new);
      double fac = err == 0.0 ? fac_max : safety * std::pow(err, -expo1) * std::pow(err_old, beta);
      fac = std::clamp(fac, fac_min, fac_max);
      if (rejected) fac = std::min(fac, 1.0);
      err_old = std::max(err, 1e-4);
      y = std::move(y_new);
      k1 = std::move(k7);
      t = t_new;
      rejected = false;
      if (last) done = true;
      h *= fac;
    } else {
      const double fac = std::max(fac_min, safety * std::pow(err, -0.2));
      h *= fac;
      rejected = true;
    }
  }
  if (cost) cost->add(steps);
  return y;
}

State verlet_integrate(const Rhs& f, const PartitionSplit& split, State u, double t0, double dt, double h,
                       StepCounter* cost) {
  if (!(h > 0.0)) throw ConfigurationError("verlet step must be positive");
  if (dt == 0.0) return u;
  const long n = step_count(std::abs(dt), h);
  const double hs = dt > 0 ? h : -h;
  double last = dt - static_cast<double>(n - 1) * hs;
  if (std::abs(last - hs) <= 1e-12 * h) last = hs;
  State acc = f(t0, u);
  for (long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * hs;
    const double step = (i + 1 == n) ? last : hs;
    for (int j : split.velocities) u[j] += 0.5 * step * acc[j];
    State drift = f(t + 0.5 * step, u);
    for (int j : split.positions) u[j] += step * drift[j];
    acc = f(t + step, u);
    for (int j : split.velocities) u[j] += 0.5 * step * acc[j];
    check_finite(u, t + step);
  }
  if (cost) cost->add(static_cast<std::uint64_t>(n));
  return u;
}

State propagate_fixed(const OdeProblem& problem, RhsKind kind, const State& u, double t0, double dt, double h,
                      StepCounter* cost, TrajectoryRecord* record) {
  Rhs f = [&problem, kind](double t, const State& v) { return problem.rhs(kind, t, v); };
  return rk4_integrate(f, u, t0, dt, h, cost, record);
}

State propagate_adaptive(const OdeProblem& problem, RhsKind kind, const State& u, double t0, double dt,
                         double rtol, double atol, StepCounter* cost, double h_init) {
  if (!(rtol > 0.0 && atol > 0.0)) throw ConfigurationError("adaptive tolerances must be positive");
  Rhs f = [&problem, kind](double t, const State& v) { return problem.rhs(kind, t, v); };
  return dopri_integrate(f, u, t0, dt, rtol, atol, h_init, 1e-3 * problem.epsilon(), cost);
}

State propagate_verlet(const OdeProblem& problem, const State& u, double t0, double dt, double h,
                       StepCounter* cost, RhsKind kind) {
  if (!problem.partition())
    throw UnsupportedError(problem.name() + " has no partitioned split for the Verlet method");
  Rhs f = [&problem, kind](double t, const State& v) { return problem.rhs(kind, t, v); };
  return verlet_integrate(f, *problem.partition(), u, t0, dt, h, cost);
}

State propagate_exact(const OdeProblem& problem, const State& u, double t0, double dt, StepCounter* cost) {
  State out = problem.exact_flow(u, t0, dt);
  if (cost) cost->add(1);
  check_finite(out, t0 + dt);
  return out;
}

namespace {

State dispatch(const OdeProblem& problem, const Rhs& f, const FineConfig& cfg, const State& u, double t0,
               double dt, StepCounter* cost) {
  switch (cfg.method) {
    case FineMethod::rk4:
      return rk4_integrate(f, u, t0, dt, cfg.h, cost);
    case FineMethod::adaptive54:
      return dopri_integrate(f, u, t0, dt, cfg.rtol, cfg.atol, cfg.h, 1e-3 * problem.epsilon(), cost);
    case FineMethod::verlet:
      if (!problem.partition())
        throw UnsupportedError(problem.name() + " has no partitioned split for the Verlet method");
      return verlet_integrate(f, *problem.partition(), u, t0, dt, cfg.h, cost);
    case FineMethod::exact:
      break;
  }
  throw UnsupportedError("exact method is not available for this right-hand side");
}

}  // namespace

State propagate_with(const OdeProblem& problem, RhsKind kind, const FineConfig& cfg, const State& u, double t0,
                     double dt, StepCounter* cost) {
  if (cfg.method == FineMethod::exact) {
    if (kind != RhsKind::full) throw UnsupportedError("exact flow only exists for the full system");
    return propagate_exact(problem, u, t0, dt, cost);
  }
  Rhs f = [&problem, kind](double t, const State& v) { return problem.rhs(kind, t, v); };
  return dispatch(problem, f, cfg, u, t0, dt, cost);
}

State propagate_filtered(const OdeProblem& problem, const FilterKernel& kernel, const State& u, double tstar,
                         double eta, const FineConfig& micro, StepCounter* cost) {
  if (eta == 0.0) return u;
  const double inv_eps = 1.0 / problem.epsilon();
  const double width = std::abs(eta);
  Rhs f = [&problem, &kernel, tstar, width, inv_eps](double t, const State& v) {
    const double s = std::min(1.0, std::abs(t - tstar) / width);
    const double w = kernel(s);
    State d = problem.fast_part(v) * inv_eps;
    if (w != 0.0) d += w * problem.slow_part(t, v);
    return d;
  };
  return dispatch(problem, f, micro, u, tstar, eta, cost);
}

FineFlow::FineFlow(ProblemPtr problem, FineConfig cfg, RhsKind kind)
    : problem_(std::move(problem)), cfg_(cfg), kind_(kind) {
  if (!problem_) throw ConfigurationError("fine flow needs a problem");
  cfg_.validate();
}

State FineFlow::propagate(const State& u, double t0, double dt, StepCounter* cost) const {
  return propagate_with(*problem_, kind_, cfg_, u, t0, dt, cost);
}

}  // namespace osc
