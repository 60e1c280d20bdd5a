#pragma once

#include <vector>

#include "osc_parareal/parareal.hpp"
#include "osc_parareal/problem.hpp"

namespace osc {

struct ErrorSeries {
  std::vector<double> state_sup_error;  // [k]
  std::vector<double> slow_sup_error;   // [k], empty without observables
  std::vector<std::vector<double>> node_state_error;  // [k][n]
};

std::vector<double> state_sup_error(const PararealRun& run, const std::vector<State>& reference);
std::vector<double> slow_sup_error(const PararealRun& run, const std::vector<State>& reference,
                                   const OdeProblem& problem);
double state_distance(const std::vector<State>& a, const std::vector<State>& b);
double slow_distance(const std::vector<State>& a, const std::vector<State>& b, const OdeProblem& problem);
ErrorSeries error_series(const PararealRun& run, const std::vector<State>& reference, const OdeProblem& problem);

// Smallest k with series[k] < tol, or cap when none.
int iterations_to_tolerance(const std::vector<double>& series, double tol, int cap);

// Least-squares slope of log(es) against log(xs).
double fit_order(const std::vector<double>& xs, const std::vector<double>& es);

}  // namespace osc
