#pragma once

#include <string>
#include <vector>

#include "osc_parareal/problems.hpp"

namespace osc {

struct SpiralStudy {
  double alpha = 0.1;
  double T = 10.0;
  double tol = 0.1;
};

// Naive parareal on u' = (alpha + i/eps) u with exact fine and a closed-form
// coarse map; first k whose sup node error is below tol, or N = T/H.
int naive_spiral_iterations(ClassicalCoarse method, double eps, double H, const SpiralStudy& study = {});
std::vector<double> naive_spiral_errors(ClassicalCoarse method, double eps, double H, int K,
                                        const SpiralStudy& study = {});

// Slow-variable parareal with the Poincare coarse map; error measured in |u|.
// Counts corrections, so the first candidate is k = 1.
struct ProposedResult {
  int iterations = 0;
  bool reached = false;
  std::vector<double> slow_errors;
};
ProposedResult proposed_spiral_iterations(double eps, int K, int workers = 0, const SpiralStudy& study = {});

struct Table1Row {
  std::string label;
  std::vector<int> counts;
  std::vector<bool> capped;
};

struct Table1 {
  std::vector<double> eps;
  std::vector<Table1Row> rows;
};

std::vector<double> table1_epsilons();
Table1 compute_table1(int workers = 0, const SpiralStudy& study = {});

}  // namespace osc
