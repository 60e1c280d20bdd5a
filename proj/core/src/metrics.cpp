#include "osc_parareal/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace osc {

namespace {

void check_grid(const std::vector<State>& a, const std::vector<State>& b) {
  if (a.size() != b.size()) throw ConfigurationError("error norms need trajectories on the same grid");
}

}  // namespace

double state_distance(const std::vector<State>& a, const std::vector<State>& b) {
  check_grid(a, b);
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, (a[n] - b[n]).norm());
  return m;
}

double slow_distance(const std::vector<State>& a, const std::vector<State>& b, const OdeProblem& problem) {
  check_grid(a, b);
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    m = std::max(m, (observe_slow(problem, a[n]) - observe_slow(problem, b[n])).cwiseAbs().maxCoeff());
  return m;
}

std::vector<double> state_sup_error(const PararealRun& run, const std::vector<State>& reference) {
  std::vector<double> out;
  for (const auto& s : run.states) out.push_back(state_distance(s, reference));
  return out;
}

std::vector<double> slow_sup_error(const PararealRun& run, const std::vector<State>& reference,
                                   const OdeProblem& problem) {
  std::vector<double> out;
  for (const auto& s : run.states) out.push_back(slow_distance(s, reference, problem));
  return out;
}

ErrorSeries error_series(const PararealRun& run, const std::vector<State>& reference, const OdeProblem& problem) {
  ErrorSeries e;
  e.state_sup_error = state_sup_error(run, reference);
  if (problem.has_observables()) e.slow_sup_error = slow_sup_error(run, reference, problem);
  for (const auto& s : run.states) {
    check_grid(s, reference);
    std::vector<double> row(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) row[n] = (s[n] - reference[n]).norm();
    e.node_state_error.push_back(std::move(row));
  }
  return e;
}

int iterations_to_tolerance(const std::vector<double>& series, double tol, int cap) {
  if (!(tol > 0.0)) throw ConfigurationError("tolerance must be positive");
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series[k] < tol) return static_cast<int>(k);
  return cap;
}

double fit_order(const std::vector<double>& xs, const std::vector<double>& es) {
  if (xs.size() != es.size() || xs.size() < 3) throw ConfigurationError("order fit needs at least three points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && es[i] > 0.0)) throw ConfigurationError("order fit needs positive data");
    const double x = std::log(xs[i]), y = std::log(es[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw ConfigurationError("order fit needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace osc
