#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <osc_parareal/problems.hpp>

namespace osc::harness {

inline constexpr int kSchemaVersion = 1;

// Unset fields keep the catalog defaults of the chosen problem.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string problem = "spiral1";
  std::optional<double> epsilon;
  std::optional<std::string> mode;
  std::optional<int> K;
  std::optional<double> T;
  std::optional<double> H;
  std::optional<std::string> forward_variant;
  std::optional<std::string> alignment_rhs;
  std::optional<std::string> on_alignment_failure;
  std::optional<std::vector<std::pair<double, double>>> resonance_windows;
  std::optional<double> stop_tolerance;

  std::optional<std::string> fine_method;
  std::optional<double> fine_h;
  std::optional<double> fine_rtol;
  std::optional<double> fine_atol;

  std::optional<double> eta;
  std::optional<std::string> estimator;
  std::optional<std::string> macro;
  std::optional<int> kernel_q;
  std::optional<int> kernel_p;
  std::optional<double> h_poincare;
  std::optional<double> micro_rtol;
  std::optional<double> micro_atol;

  std::optional<double> h_phase;
  std::optional<double> align_eta;
  std::optional<double> align_tol;
  std::optional<double> align_max_window;

  std::string out_dir = "out";
  std::optional<int> workers;

  bool operator==(const ExperimentConfig&) const = default;
};

std::string emit_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// key=value; the value is read as JSON when it parses, as a string otherwise.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

BenchmarkSpec build_spec(const ExperimentConfig& cfg);

}  // namespace osc::harness
