#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <osc_harness/commands.hpp>
#include <osc_parareal/alignment.hpp>

using namespace osc::harness;

namespace {

ExperimentConfig assemble(const std::string& config_path, const std::string& problem,
                          const std::vector<std::string>& overrides, const std::string& out_dir, int workers) {
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  if (!problem.empty()) cfg.problem = problem;
  for (const auto& o : overrides) apply_override(cfg, o);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (workers >= 0) cfg.workers = workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parareal for highly oscillatory ODEs with a Poincare-map coarse integrator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, problem;
  std::vector<std::string> overrides;
  int workers = -1;
  bool quiet = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
    sub->add_option("--override", overrides, "key=value config override (repeatable)");
    sub->add_flag("--quiet", quiet, "suppress alignment warnings");
  };

  auto* run = app.add_subcommand("run", "run one parareal experiment");
  common(run);
  run->add_option("problem", problem, "catalog problem (overrides the config)");

  auto* table1 = app.add_subcommand("table1", "iteration counts on the expanding spiral");
  table1->add_option("--out", out_dir, "output directory");
  table1->add_option("--workers", workers, "worker threads");

  auto* sweep = app.add_subcommand("sweep", "repeat a run over parameter values");
  common(sweep);
  sweep->add_option("problem", problem, "catalog problem (overrides the config)");
  std::string parameter;
  std::vector<double> values;
  std::string kind = "parareal";
  sweep->add_option("--param", parameter, "H, eta, epsilon or h_phase")->required();
  sweep->add_option("--values", values, "values to sweep")->delimiter(',');
  sweep->add_option("--kind", kind, "parareal, forward_alignment or poincare_bound")
      ->check(CLI::IsMember({"parareal", "forward_alignment", "poincare_bound"}));

  auto* plot = app.add_subcommand("plotdata", "semilog error plots from run directories");
  std::vector<std::string> dirs;
  plot->add_option("dirs", dirs, "run output directories")->required();
  plot->add_option("--out", out_dir, "plot directory");

  app.add_subcommand("list-problems", "list the problem catalog");

  CLI11_PARSE(app, argc, argv);
  if (quiet) osc::set_alignment_warnings(false);

  try {
    if (*run) return cmd_run(assemble(config_path, problem, overrides, out_dir, workers), std::cout, std::cerr);
    if (*table1) return cmd_table1(out_dir.empty() ? "out" : out_dir, std::max(workers, 0), std::cout, std::cerr);
    if (*sweep) {
      const SweepKind k = kind == "forward_alignment" ? SweepKind::forward_alignment
                          : kind == "poincare_bound"  ? SweepKind::poincare_bound
                                                      : SweepKind::parareal;
      return cmd_sweep(assemble(config_path, problem, overrides, out_dir, workers), parameter, values, k, std::cout,
                       std::cerr);
    }
    if (*plot) {
      std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
      return cmd_plotdata(paths, out_dir.empty() ? "plots" : out_dir, std::cout, std::cerr);
    }
    cmd_list_problems(std::cout);
  } catch (const osc::CatalogError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const osc::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
