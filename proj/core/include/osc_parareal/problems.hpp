#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osc_parareal/alignment.hpp"
#include "osc_parareal/integrators.hpp"
#include "osc_parareal/parareal.hpp"
#include "osc_parareal/poincare.hpp"
#include "osc_parareal/problem.hpp"

namespace osc {

enum class ReferenceKind { analytic, sequential_fine };

struct BenchmarkSpec {
  std::string name;
  ProblemPtr problem;
  double T = 0.0;
  double H = 0.0;
  int K = 0;
  PararealMode mode = PararealMode::full_state;
  ForwardVariant forward_variant = ForwardVariant::improved;
  std::vector<TimeWindow> resonance_windows;
  AlignmentFailurePolicy on_alignment_failure = AlignmentFailurePolicy::abort;
  std::optional<double> stop_tolerance;
  FineConfig fine;
  double h_fine = 0.0;  // nominal fine step for the cost model
  PoincareConfig poincare;
  double h_poincare = 0.0;
  AlignmentConfig alignment;
  ReferenceKind reference = ReferenceKind::sequential_fine;

  int N() const;
  std::vector<double> grid() const;
  // Assembles flows and driver settings from the fields above.
  PararealConfig parareal_config(int workers = 0) const;
  CostModel cost_model() const;
};

std::vector<std::string> catalog_names();
double default_epsilon(const std::string& name);
// epsilon <= 0 selects the problem's default.
BenchmarkSpec make_problem(const std::string& name, double epsilon = 0.0);

// Closed-form coarse maps for u' = (alpha + i/eps) u.
enum class ClassicalCoarse { explicit_euler, implicit_euler, trapezoidal };

class LinearSpiralCoarse : public FlowMap {
 public:
  LinearSpiralCoarse(double alpha, double epsilon, ClassicalCoarse method);
  State propagate(const State& u, double t0, double dt, StepCounter* cost = nullptr) const override;

 private:
  double alpha_;
  double epsilon_;
  ClassicalCoarse method_;
};

class ExactFlow : public FlowMap {
 public:
  explicit ExactFlow(ProblemPtr problem);
  State propagate(const State& u, double t0, double dt, StepCounter* cost = nullptr) const override;

 private:
  ProblemPtr problem_;
};

// Cache directory from OSC_PARAREAL_CACHE, if set.
std::optional<std::filesystem::path> default_cache_dir();

// Analytic values where available, otherwise one sequential fine integration
// through the grid, cached on disk when a directory is given.
std::vector<State> reference_trajectory(const BenchmarkSpec& spec, const std::vector<double>& grid,
                                        const std::optional<std::filesystem::path>& cache_dir = default_cache_dir());

}  // namespace osc
