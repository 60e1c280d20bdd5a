#include "osc_parareal/alignment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <vector>

#include "osc_parareal/integrators.hpp"

namespace osc {

namespace {

std::atomic<bool> g_warnings{true};

Rhs make_rhs(const OdeProblem& problem, RhsKind kind) {
  return [&problem, kind](double t, const State& v) { return problem.rhs(kind, t, v); };
}

std::vector<double> distances(const std::vector<State>& xs, const State& v0) {
  std::vector<double> j(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) j[i] = (xs[i] - v0).squaredNorm();
  return j;
}

// Interior discrete minimizers; a plateau counts once, at its first index.
std::vector<long> interior_minima(const std::vector<double>& j) {
  std::vector<long> out;
  const long n = static_cast<long>(j.size());
  for (long i = 1; i + 1 < n; ++i) {
    if (!(j[i] < j[i - 1])) continue;
    long k = i + 1;
    while (k < n && j[k] == j[i]) ++k;
    if (k < n && j[k] > j[i]) out.push_back(i);
  }
  return out;
}

// Minimizer of |p(s) - v0| over s in [-1,1], p the quadratic through (um, u, up).
double refine_offset(const State& um, const State& u, const State& up, const State& v0) {
  const State a = 0.5 * (up - 2.0 * u + um);
  const State b = 0.5 * (up - um);
  const State c = u - v0;
  auto g = [&](double s) { return (c + s * b + s * s * a).squaredNorm(); };
  const double jm = (um - v0).squaredNorm(), j0 = c.squaredNorm(), jp = (up - v0).squaredNorm();
  const double den = jm - 2.0 * j0 + jp;
  double s = den > 0.0 ? std::clamp(0.5 * (jm - jp) / den, -1.0, 1.0) : 0.0;
  for (int it = 0; it < 40; ++it) {
    const State r = c + s * b + s * s * a;
    const State dr = b + 2.0 * s * a;
    const double d1 = 2.0 * r.dot(dr);
    const double d2 = 2.0 * (dr.squaredNorm() + 2.0 * r.dot(a));
    if (!(d2 > 0.0)) break;
    const double next = std::clamp(s - d1 / d2, -1.0, 1.0);
    const double ds = next - s;
    s = next;
    if (std::abs(ds) < 1e-15) break;
  }
  return g(s) <= j0 ? s : 0.0;
}

double refined_value(const State& um, const State& u, const State& up, const State& v0) {
  const double s = refine_offset(um, u, up, v0);
  return ((u - v0) + 0.5 * s * (up - um) + 0.5 * s * s * (up - 2.0 * u + um)).squaredNorm();
}

// Rejection compares quadratically refined minimum values; raw grid values
// are dominated by the grid offset of the phase.
long first_acceptable(const std::vector<State>& xs, const State& v0, const AlignmentConfig& cfg) {
  const auto j = distances(xs, v0);
  auto mins = interior_minima(j);
  if (mins.empty()) return -1;
  std::vector<double> val;
  for (long i : mins) val.push_back(refined_value(xs[i - 1], xs[i], xs[i + 1], v0));
  const double best = *std::min_element(val.begin(), val.end());
  const double top = *std::max_element(j.begin(), j.end());
  for (std::size_t m = 0; m < mins.size(); ++m)
    if (val[m] <= cfg.reject_ratio * best && val[m] <= cfg.depth_ratio * top) return mins[m];
  return -1;
}

MinimumHit scan_direction(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0,
                          const State& v0, double t0, double dir, std::uint64_t& cost, State* first_step) {
  const Rhs f = make_rhs(problem, cfg.rhs);
  TrajectoryRecord rec;
  double eta = cfg.initial_eta;
  long idx = -1;
  for (;;) {
    StepCounter c;
    rk4_integrate(f, u0, t0, dir * eta, cfg.h_phase, &c, &rec);
    cost += c.steps;
    if (first_step) *first_step = rec.states[1];
    idx = first_acceptable(rec.states, v0, cfg);
    if (idx >= 0) break;
    if (2.0 * eta > cfg.max_window * (1.0 + 1e-12))
      throw AlignmentFailure("no interior minimum of the phase functional within the maximal window");
    eta *= 2.0;
  }

  double h = cfg.h_phase;
  double tau = static_cast<double>(idx) * h;
  State x = rec.states[idx];
  State xm = rec.states[idx - 1], xp = rec.states[idx + 1];
  for (int m = 0; m < cfg.max_halvings; ++m) {
    const double hn = 0.5 * h;
    StepCounter c;
    rk4_integrate(f, xm, t0 + dir * (tau - h), dir * 2.0 * h, hn, &c, &rec);
    cost += c.steps;
    auto mins = interior_minima(distances(rec.states, v0));
    if (mins.empty()) break;
    long pick = mins.front();
    for (long i : mins)
      if (std::abs(i - 2) < std::abs(pick - 2)) pick = i;
    const double move = (rec.states[pick] - x).norm();
    tau += static_cast<double>(pick - 2) * hn;
    h = hn;
    x = rec.states[pick];
    xm = rec.states[pick - 1];
    xp = rec.states[pick + 1];
    if (move < cfg.tol_factor) break;
  }

  const double s = refine_offset(xm, x, xp, v0);
  MinimumHit hit;
  hit.h = h;
  hit.t = dir * (tau + s * h);
  hit.state = s == 0.0 ? x : rk4_step(f, x, t0 + dir * tau, dir * s * h);
  if (s != 0.0) cost += 1;
  return hit;
}

State shift(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u, double t, double tau,
            double h, std::uint64_t& cost) {
  StepCounter c;
  State out = rk4_integrate(make_rhs(problem, cfg.rhs), u, t, tau, h, &c);
  cost += c.steps;
  return out;
}

struct NearHit {
  MinimumHit hit;
  std::uint64_t cost;
};

NearHit nearest(MinimaPair mp) {
  return {std::abs(mp.plus.t) <= std::abs(mp.minus.t) ? std::move(mp.plus) : std::move(mp.minus), mp.cost};
}

void warn(const char* what) {
  if (g_warnings.load()) std::clog << "warning: " << what << ", using basic forward alignment\n";
}

}  // namespace

void set_alignment_warnings(bool enabled) { g_warnings.store(enabled); }
bool alignment_warnings() { return g_warnings.load(); }

AlignmentConfig AlignmentConfig::defaults(double epsilon) {
  AlignmentConfig c;
  c.h_phase = epsilon / 100.0;
  c.initial_eta = epsilon;
  c.tol_factor = epsilon / 100.0;
  c.max_window = 64.0 * epsilon;
  return c;
}

void AlignmentConfig::validate() const {
  if (!(h_phase > 0.0 && initial_eta > 0.0 && tol_factor > 0.0 && max_window >= initial_eta))
    throw ConfigurationError("alignment: step, window and tolerance must be positive");
  if (!(reject_ratio >= 1.0 && depth_ratio > 0.0 && depth_ratio <= 1.0))
    throw ConfigurationError("alignment: invalid minimum rejection ratios");
}

MinimaPair scan_minima(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0, const State& v0,
                       double t0, bool include_origin) {
  cfg.validate();
  if (!u0.allFinite() || !v0.allFinite()) throw ConfigurationError("alignment: non-finite input");
  MinimaPair out;
  State xp, xm;
  out.plus = scan_direction(problem, cfg, u0, v0, t0, 1.0, out.cost, &xp);
  out.minus = scan_direction(problem, cfg, u0, v0, t0, -1.0, out.cost, &xm);
  if (!include_origin) return out;
  // A minimum sitting at the starting point is the nearest match; it replaces
  // the interior minimum on its side so that the pair spans one period.
  const double j0 = (u0 - v0).squaredNorm();
  if (j0 <= (xp - v0).squaredNorm() && j0 <= (xm - v0).squaredNorm()) {
    const double s = refine_offset(xm, u0, xp, v0);
    MinimumHit hit;
    hit.h = cfg.h_phase;
    hit.t = s * cfg.h_phase;
    hit.state = s == 0.0 ? u0 : rk4_step(make_rhs(problem, cfg.rhs), u0, t0, hit.t);
    out.cost += s == 0.0 ? 0 : 1;
    out.origin = true;
    (s >= 0.0 ? out.plus : out.minus) = std::move(hit);
  }
  return out;
}

ShiftPair scan_first_minima(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0,
                            const State& v0, double t0) {
  auto mp = scan_minima(problem, cfg, u0, v0, t0, false);
  return {mp.plus.t, mp.minus.t};
}

std::pair<double, double> alignment_weights(double t_plus, double t_minus, double h_phase) {
  const double d = t_plus - t_minus;
  if (std::abs(d) < 1e-3 * h_phase) return {1.0, 0.0};
  const double lp = -t_minus / d;
  return {lp, 1.0 - lp};
}

AlignmentResult local_align(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u0,
                            const State& v0, double t0, StepCounter* cost) {
  auto mp = scan_minima(problem, cfg, u0, v0, t0);
  AlignmentResult r;
  r.t_plus = mp.plus.t;
  r.t_minus = mp.minus.t;
  std::tie(r.lambda_plus, r.lambda_minus) = alignment_weights(r.t_plus, r.t_minus, cfg.h_phase);
  r.aligned_state = r.lambda_plus * mp.plus.state + r.lambda_minus * mp.minus.state;
  r.scan_cost = mp.cost;
  if (cost) cost->add(mp.cost);
  return r;
}

State forward_align_basic(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u1, const State& u0,
                          const State& v0, double t0, double t1, StepCounter* cost) {
  auto mp = scan_minima(problem, cfg, u0, v0, t0);
  std::uint64_t c = mp.cost;
  auto [lp, lm] = alignment_weights(mp.plus.t, mp.minus.t, cfg.h_phase);
  State a = shift(problem, cfg, u1, t1, mp.plus.t, mp.plus.h, c);
  State b = shift(problem, cfg, u1, t1, mp.minus.t, mp.minus.h, c);
  if (cost) cost->add(c);
  return lp * a + lm * b;
}

State forward_align_improved(const OdeProblem& problem, const AlignmentConfig& cfg, const State& u1,
                             const State& u0, const State& v0, double t0, double t1, StepCounter* cost) {
  auto mp = scan_minima(problem, cfg, u0, v0, t0);
  std::uint64_t c = mp.cost;
  const double tp = mp.plus.t, tm = mp.minus.t;
  auto [lp, lm] = alignment_weights(tp, tm, cfg.h_phase);
  const State a = shift(problem, cfg, u1, t1, tp, mp.plus.h, c);
  const State b = shift(problem, cfg, u1, t1, tm, mp.minus.h, c);
  const State basic = lp * a + lm * b;

  try {
    auto gp = scan_minima(problem, cfg, a, b, t1 + tp);
    c += gp.cost;
    const double tpp = tp + lm * gp.plus.t;
    const double tpm = tp + lm * gp.minus.t;
    const State cpp = shift(problem, cfg, a, t1 + tp, lm * gp.plus.t, gp.plus.h, c);
    const State cpm = shift(problem, cfg, a, t1 + tp, lm * gp.minus.t, gp.minus.h, c);

    auto g1 = nearest(scan_minima(problem, cfg, b, cpp, t1 + tm));
    auto g2 = nearest(scan_minima(problem, cfg, b, cpm, t1 + tm));
    const double tmm = tm + g1.hit.t;
    const double tmp = tm + g2.hit.t;
    c += g1.cost + g2.cost;

    auto [wpp, wmm] = alignment_weights(tpp, tmm, cfg.h_phase);
    auto [wpm, wmp] = alignment_weights(tpm, tmp, cfg.h_phase);
    const State first = wpp * cpp + wmm * g1.hit.state;
    const State second = wpm * cpm + wmp * g2.hit.state;
    if (cost) cost->add(c);
    return (first - basic).norm() <= (second - basic).norm() ? first : second;
  } catch (const AlignmentFailure&) {
    warn("orientation scan failed");
  }
  if (cost) cost->add(c);
  return basic;
}

}  // namespace osc
