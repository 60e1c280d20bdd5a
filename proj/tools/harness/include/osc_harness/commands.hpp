#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <osc_parareal/metrics.hpp>

#include "osc_harness/config.hpp"

namespace osc::harness {

struct RunOutcome {
  BenchmarkSpec spec;
  PararealRun run;
  ErrorSeries errors;
};

RunOutcome execute(const ExperimentConfig& cfg);

void write_iterations_csv(const std::filesystem::path& file, const RunOutcome& r);
void write_nodes_csv(const std::filesystem::path& file, const RunOutcome& r);

// Exit status: 0 success, 1 bad input, 2 solver abort (partial artifacts written).
int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_table1(const std::filesystem::path& out_dir, int workers, std::ostream& out, std::ostream& err);

enum class SweepKind { parareal, forward_alignment, poincare_bound };
int cmd_sweep(const ExperimentConfig& cfg, const std::string& parameter, const std::vector<double>& values,
              SweepKind kind, std::ostream& out, std::ostream& err);
int cmd_plotdata(const std::vector<std::filesystem::path>& dirs, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err);
void cmd_list_problems(std::ostream& out);

// Distance of the forward-aligned end point from the fine image of the
// locally aligned start point, for the basic and improved variants.
struct ForwardAlignmentError {
  double basic = 0.0;
  double improved = 0.0;
};
ForwardAlignmentError forward_alignment_error(const BenchmarkSpec& spec, double H);

// Component of 2*eta*P(u) along the fast field direction at u.
double poincare_phase_component(const BenchmarkSpec& spec, const State& u, double eta);

std::string fmt17(double v);

}  // namespace osc::harness
