#include "osc_harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <osc_parareal/osc_parareal.hpp>

#include "osc_harness/svg.hpp"

namespace osc::harness {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream f(file);
  if (!f) throw Error("cannot write " + file.string());
  return f;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int resolved_workers(const ExperimentConfig& cfg) { return cfg.workers.value_or(0); }

}  // namespace

RunOutcome execute(const ExperimentConfig& cfg) {
  RunOutcome r;
  r.spec = build_spec(cfg);
  const auto pc = r.spec.parareal_config(resolved_workers(cfg));
  r.run = run_parareal(*r.spec.problem, pc, r.spec.problem->initial());
  const auto ref = reference_trajectory(r.spec, r.spec.grid());
  r.errors = error_series(r.run, ref, *r.spec.problem);
  return r;
}

void write_iterations_csv(const fs::path& file, const RunOutcome& r) {
  auto f = open_out(file);
  f << "iteration,state_sup_error,slow_sup_error,wallclock,fine_steps,fine_steps_max_segment,coarse_steps,"
       "alignment_steps,alignment_fallbacks,measured_tau\n";
  const auto& e = r.errors;
  for (std::size_t k = 0; k < e.state_sup_error.size(); ++k) {
    const IterationCost c = k < r.run.cost.size() ? r.run.cost[k] : IterationCost{};
    f << k << ',' << fmt17(e.state_sup_error[k]) << ','
      << fmt17(e.slow_sup_error.empty() ? NAN : e.slow_sup_error[k]) << ',' << fmt17(c.wallclock) << ','
      << c.fine_steps << ',' << c.fine_steps_max_segment << ',' << c.coarse_steps << ',' << c.alignment_steps << ','
      << c.alignment_fallbacks << ',' << fmt17(measured_tau(c, r.spec.h_fine)) << '\n';
  }
}

void write_nodes_csv(const fs::path& file, const RunOutcome& r) {
  auto f = open_out(file);
  const int dim = r.spec.problem->dim();
  f << "iteration,node,t";
  for (int i = 0; i < dim; ++i) f << ",u" << i;
  f << '\n';
  for (std::size_t k = 0; k < r.run.states.size(); ++k)
    for (std::size_t n = 0; n < r.run.states[k].size(); ++n) {
      f << k << ',' << n << ',' << fmt17(static_cast<double>(n) * r.spec.H);
      for (int i = 0; i < dim; ++i) f << ',' << fmt17(r.run.states[k][n][i]);
      f << '\n';
    }
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  RunOutcome r;
  try {
    r = execute(cfg);
  } catch (const CatalogError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  open_out(dir / "config.json") << emit_config(cfg);
  write_iterations_csv(dir / "iterations.csv", r);
  write_nodes_csv(dir / "nodes.csv", r);

  out << r.spec.name << " eps=" << r.spec.problem->epsilon() << " N=" << r.spec.N() << " K=" << r.run.completed
      << '\n';
  for (std::size_t k = 0; k < r.errors.state_sup_error.size(); ++k) {
    out << "  k=" << k << " state=" << std::scientific << std::setprecision(3) << r.errors.state_sup_error[k];
    if (!r.errors.slow_sup_error.empty()) out << " slow=" << r.errors.slow_sup_error[k];
    out << std::defaultfloat << '\n';
  }
  try {
    const auto est = speedup_estimate(r.spec.cost_model(), std::max(1, r.run.completed));
    out << "  model tau=" << est.tau << " speedup=" << est.speedup << '\n';
  } catch (const ConfigurationError&) {
  }
  out << "  wrote " << (dir / "iterations.csv").string() << '\n';
  if (r.run.aborted) {
    err << "error: run aborted after iteration " << r.run.completed << ": " << r.run.abort_reason << '\n';
    return 2;
  }
  return 0;
}

int cmd_table1(const fs::path& out_dir, int workers, std::ostream& out, std::ostream&) {
  const Table1 t = compute_table1(workers);
  fs::create_directories(out_dir);
  auto f = open_out(out_dir / "table1.csv");
  f << "method,epsilon,iterations,capped\n";
  out << std::left << std::setw(26) << "coarse integrator";
  for (double e : t.eps) out << std::right << std::setw(8) << e;
  out << '\n';
  for (const auto& row : t.rows) {
    out << std::left << std::setw(26) << row.label;
    for (std::size_t i = 0; i < t.eps.size(); ++i) {
      std::string cell = std::to_string(row.counts[i]);
      if (row.capped[i] && row.label.rfind("proposed", 0) == 0) cell = ">" + cell;
      out << std::right << std::setw(8) << cell;
      f << row.label << ',' << fmt17(t.eps[i]) << ',' << row.counts[i] << ',' << (row.capped[i] ? 1 : 0) << '\n';
    }
    out << '\n';
  }
  out << "wrote " << (out_dir / "table1.csv").string() << '\n';
  return 0;
}

ForwardAlignmentError forward_alignment_error(const BenchmarkSpec& spec, double H) {
  const auto& p = *spec.problem;
  const auto fine = spec.parareal_config(1).fine;
  const double eps = p.epsilon();
  const State u0 = p.initial();
  const Rhs f0 = [&p](double t, const State& u) { return p.rhs(RhsKind::unperturbed, t, u); };
  const State v0 = rk4_integrate(f0, u0, 0.0, 0.3 * eps, eps / 1000.0);
  const State w0 = local_align(p, spec.alignment, u0, v0).aligned_state;
  const State u1 = fine->propagate(u0, 0.0, H);
  const State w1 = fine->propagate(w0, 0.0, H);
  ForwardAlignmentError e;
  e.basic = (forward_align_basic(p, spec.alignment, u1, u0, v0, 0.0, H) - w1).norm();
  e.improved = (forward_align_improved(p, spec.alignment, u1, u0, v0, 0.0, H) - w1).norm();
  return e;
}

double poincare_phase_component(const BenchmarkSpec& spec, const State& u, double eta) {
  PoincareConfig cfg = spec.poincare;
  cfg.eta = eta;
  const State P = force_z_symmetric(*spec.problem, cfg, u);
  const State fast = spec.problem->fast_part(u);
  return std::abs(2.0 * eta * P.dot(fast) / fast.norm());
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& parameter, const std::vector<double>& values,
              SweepKind kind, std::ostream& out, std::ostream& err) {
  static const char* const params[] = {"H", "eta", "epsilon", "h_phase"};
  if (std::find(std::begin(params), std::end(params), parameter) == std::end(params)) {
    err << "error: sweep parameter must be one of H, eta, epsilon, h_phase\n";
    return 1;
  }
  if (kind == SweepKind::forward_alignment && parameter != "H") {
    err << "error: forward_alignment sweeps vary H\n";
    return 1;
  }
  if (kind == SweepKind::poincare_bound && parameter != "eta") {
    err << "error: poincare_bound sweeps vary eta\n";
    return 1;
  }
  const fs::path file = fs::path(cfg.out_dir) / "sweep.csv";
  auto f = open_out(file);
  switch (kind) {
    case SweepKind::parareal:
      f << "value,iteration,state_sup_error,slow_sup_error,status\n";
      break;
    case SweepKind::forward_alignment:
      f << "value,basic_error,improved_error,status\n";
      break;
    case SweepKind::poincare_bound:
      f << "value,phase_component,status\n";
      break;
  }
  int failures = 0;
  for (double v : values) {
    ExperimentConfig c = cfg;
    if (parameter == "H") c.H = v;
    if (parameter == "eta") c.eta = v;
    if (parameter == "epsilon") c.epsilon = v;
    if (parameter == "h_phase") c.h_phase = v;
    try {
      if (kind == SweepKind::parareal) {
        const auto r = execute(c);
        const auto& e = r.errors;
        const std::string status = r.run.aborted ? "aborted: " + sanitize(r.run.abort_reason) : "ok";
        for (std::size_t k = 0; k < e.state_sup_error.size(); ++k)
          f << fmt17(v) << ',' << k << ',' << fmt17(e.state_sup_error[k]) << ','
            << fmt17(e.slow_sup_error.empty() ? NAN : e.slow_sup_error[k]) << ',' << status << '\n';
      } else if (kind == SweepKind::forward_alignment) {
        const auto e = forward_alignment_error(build_spec(c), v);
        f << fmt17(v) << ',' << fmt17(e.basic) << ',' << fmt17(e.improved) << ",ok\n";
      } else {
        const auto spec = build_spec(c);
        f << fmt17(v) << ',' << fmt17(poincare_phase_component(spec, spec.problem->initial(), v)) << ",ok\n";
      }
    } catch (const std::exception& e) {
      ++failures;
      err << "warning: " << parameter << "=" << v << " failed: " << e.what() << '\n';
      if (kind == SweepKind::parareal)
        f << fmt17(v) << ",-1,nan,nan,failed: " << sanitize(e.what()) << '\n';
      else if (kind == SweepKind::forward_alignment)
        f << fmt17(v) << ",nan,nan,failed: " << sanitize(e.what()) << '\n';
      else
        f << fmt17(v) << ",nan,failed: " << sanitize(e.what()) << '\n';
    }
  }
  out << "wrote " << file.string() << " (" << values.size() << " values, " << failures << " failed)\n";
  return 0;
}

namespace {

struct IterationTable {
  std::string label;
  std::vector<double> state, slow;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

IterationTable load_iterations(const fs::path& dir) {
  std::ifstream in(dir / "iterations.csv");
  std::string line;
  std::getline(in, line);
  const auto head = split(line);
  auto col = [&](const char* name) {
    auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) throw Error((dir / "iterations.csv").string() + ": missing column " + name);
    return static_cast<std::size_t>(it - head.begin());
  };
  const std::size_t cs = col("state_sup_error"), cw = col("slow_sup_error");
  IterationTable t;
  t.label = dir.filename().string();
  if (t.label.empty()) t.label = dir.parent_path().filename().string();
  if (fs::exists(dir / "config.json")) {
    const auto c = load_config((dir / "config.json").string());
    t.label = c.problem + (c.alignment_rhs ? " (" + *c.alignment_rhs + " alignment)" : "");
  }
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.size() <= std::max(cs, cw)) continue;
    t.state.push_back(std::stod(cells[cs]));
    t.slow.push_back(std::stod(cells[cw]));
  }
  return t;
}

}  // namespace

int cmd_plotdata(const std::vector<fs::path>& dirs, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  if (dirs.empty()) {
    err << "error: no run directories given\n";
    return 1;
  }
  std::vector<IterationTable> runs;
  for (const auto& d : dirs) {
    if (fs::exists(d / "iterations.csv")) {
      runs.push_back(load_iterations(d));
    } else if (fs::exists(d / "table1.csv")) {
      out << d.string() << ": table1 output is tabular, no plot produced\n";
    } else {
      err << "error: " << d.string() << " has no iterations.csv\n";
      return 1;
    }
  }
  if (runs.empty()) return 0;
  fs::create_directories(out_dir);
  std::vector<PlotPanel> state, slow;
  for (const auto& r : runs) {
    state.push_back({r.label, "state sup-error", r.state});
    if (std::any_of(r.slow.begin(), r.slow.end(), [](double v) { return !std::isnan(v); }))
      slow.push_back({r.label, "slow sup-error", r.slow});
  }
  open_out(out_dir / "state_error.svg") << semilog_svg(state);
  out << "wrote " << (out_dir / "state_error.svg").string() << '\n';
  if (!slow.empty()) {
    open_out(out_dir / "slow_error.svg") << semilog_svg(slow);
    out << "wrote " << (out_dir / "slow_error.svg").string() << '\n';
  }
  return 0;
}

void cmd_list_problems(std::ostream& out) {
  for (const auto& name : catalog_names()) {
    const auto s = make_problem(name);
    out << std::left << std::setw(16) << name << " eps=" << s.problem->epsilon() << " T=" << s.T << " H=" << s.H
        << " dim=" << s.problem->dim() << '\n';
  }
}

}  // namespace osc::harness
