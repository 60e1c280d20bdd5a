// One PASS/FAIL line per acceptance criterion. Exit status is nonzero only
// with --strict and at least one FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include <CLI11.hpp>

#include <osc_harness/commands.hpp>
#include <osc_parareal/osc_parareal.hpp>

using namespace osc;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct RunErrors {
  std::vector<double> state;
  std::vector<double> slow;
  bool aborted = false;
};

RunErrors run_spec(const BenchmarkSpec& s, int workers) {
  const auto run = run_parareal(*s.problem, s.parareal_config(workers), s.problem->initial());
  const auto ref = reference_trajectory(s, s.grid());
  RunErrors r;
  r.state = state_sup_error(run, ref);
  r.slow = slow_sup_error(run, ref, *s.problem);
  r.aborted = run.aborted;
  return r;
}

double at(const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : INFINITY; }
double last(const std::vector<double>& v) { return v.empty() ? INFINITY : v.back(); }

Verdict table1_reproduction() {
  const auto t = compute_table1(1);
  const std::vector<std::vector<int>> paper = {
      {7, 12, 22, 52, 607, 12200}, {6, 8, 13, 25, 44, 351}, {1, 1, 2, 3, 5, 29},
      {34, 79, 100, 100, 100, 100}, {18, 49, 93, 100, 100, 100}, {4, 18, 71, 100, 100, 100}};
  // rows 0..2 use H = eps/5, rows 3..5 H = 1/10
  const int order[] = {0, 1, 2, 3, 4, 5};
  const int largest_a = 12200, largest_b = 607;
  int bad = 0;
  std::ostringstream os;
  for (int r : order) {
    const auto& row = t.rows[r];
    for (std::size_t i = 0; i < paper[r].size(); ++i) {
      const int want = paper[r][i], got = row.counts[i];
      bool ok;
      if (r >= 3 && want == 100)
        ok = row.capped[i];
      else if (want == largest_a || want == largest_b)
        ok = std::abs(got - want) <= 0.02 * want;
      else
        ok = got == want;
      if (!ok) {
        if (bad < 8) os << ' ' << row.label << " eps=" << t.eps[i] << ": " << got << " vs " << want << ';';
        ++bad;
      }
    }
  }
  Verdict v;
  v.pass = bad == 0;
  v.detail = bad == 0 ? "all 36 entries match" : std::to_string(bad) + " of 36 entries differ:" + os.str();
  return v;
}

Verdict proposed_row(int workers) {
  Verdict v{true, "K ="};
  for (double e : table1_epsilons()) {
    const auto r = proposed_spiral_iterations(e, 3, workers);
    const bool ok = r.reached && r.iterations == 1;
    v.pass = v.pass && ok;
    v.detail += " " + std::to_string(r.iterations) + (r.reached ? "" : "+") + "(err1=" + sci(at(r.slow_errors, 1)) + ")";
  }
  return v;
}

Verdict spiral1(int workers) {
  Verdict v{true, ""};
  for (double eps : {1e-3, 1e-4}) {
    auto full = make_problem("spiral1", eps);
    full.alignment.rhs = RhsKind::full;
    const auto a = run_spec(full, workers);
    auto unp = make_problem("spiral1", eps);
    unp.alignment.rhs = RhsKind::alignment;
    const auto b = run_spec(unp, workers);
    const bool slow_ok = at(a.slow, 1) < eps && at(b.slow, 1) < eps;
    const bool plateau_ok = !a.aborted && last(a.state) <= 10 * eps;
    const bool contrast_ok = !b.aborted && at(b.state, 3) <= 10 * at(b.slow, 3);
    v.pass = v.pass && slow_ok && plateau_ok && contrast_ok;
    v.detail += " eps=" + sci(eps) + ": slow1=" + sci(std::max(at(a.slow, 1), at(b.slow, 1))) +
                (slow_ok ? "" : "(x)") + " full-align plateau=" + sci(last(a.state)) + (plateau_ok ? "" : "(x)") +
                " unperturbed state3/slow3=" + sci(at(b.state, 3)) + "/" + sci(at(b.slow, 3)) +
                (contrast_ok ? "" : "(x)") + ";";
  }
  return v;
}

Verdict spiral2(int workers) {
  const double eps = 1e-3;
  const auto r = run_spec(make_problem("spiral2", eps), workers);
  Verdict v;
  v.pass = !r.aborted && at(r.slow, 1) < eps && at(r.state, 2) * 10 <= at(r.state, 0);
  v.detail = "slow1=" + sci(at(r.slow, 1)) + " state0=" + sci(at(r.state, 0)) + " state2=" + sci(at(r.state, 2));
  return v;
}

Verdict stellar(int workers) {
  auto s = make_problem("stellar", 1e-4);
  s.K = std::max(s.K, 4);
  const auto r = run_spec(s, workers);
  Verdict v;
  v.pass = !r.aborted && at(r.state, 4) < 1e-4;
  v.detail = "state4=" + sci(at(r.state, 4));
  return v;
}

Verdict forward_order() {
  const auto spec = make_problem("spiral2", 1e-3);
  std::vector<double> Hs{0.4, 0.2, 0.1, 0.05}, basic, improved;
  for (double H : Hs) {
    const auto e = harness::forward_alignment_error(spec, H);
    basic.push_back(e.basic);
    improved.push_back(e.improved);
  }
  const double slope = fit_order(Hs, basic);
  Verdict v;
  v.pass = std::abs(slope - 2.0) <= 0.3;
  v.detail = "slope=" + std::to_string(slope) + " errors";
  for (double e : basic) v.detail += " " + sci(e);
  v.detail += " (improved";
  for (double e : improved) v.detail += " " + sci(e);
  v.detail += ")";
  return v;
}

Verdict resonance(int workers) {
  set_alignment_warnings(false);
  auto with = make_problem("resonance", 1e-4);
  with.K = std::max(with.K, 4);
  const auto a = run_spec(with, workers);
  auto without = with;
  without.resonance_windows.clear();
  without.on_alignment_failure = AlignmentFailurePolicy::naive_correction;
  const auto b = run_spec(without, workers);
  bool mono = !a.aborted;
  for (std::size_t k = 2; k <= 4; ++k) mono = mono && at(a.state, k) < at(a.state, k - 1);
  const bool slow_ok = at(a.slow, 3) < 1e-3;
  const bool contrast = b.aborted || at(b.state, 4) > 0.1;
  Verdict v;
  v.pass = mono && slow_ok && contrast;
  v.detail = "window state1..4=" + sci(at(a.state, 1)) + "," + sci(at(a.state, 2)) + "," + sci(at(a.state, 3)) + "," +
             sci(at(a.state, 4)) + (mono ? "" : "(x)") + " slow3=" + sci(at(a.slow, 3)) + (slow_ok ? "" : "(x)") +
             "; no window state4=" + (b.aborted ? std::string("aborted") : sci(at(b.state, 4))) +
             (contrast ? "" : "(x)");
  return v;
}

bool bitwise(const State& a, const State& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

Verdict properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  };

  double worst_moment = 0.0;
  for (int q = 0; q <= 5; ++q)
    for (int p = 0; p <= 2; ++p) {
      const auto k = make_kernel(q, p);
      for (int j = 0; j <= p; ++j) {
        auto f = [&](double s) { return k(1.0 - s) * std::pow(s, j); };
        const double m = boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, 1.0);
        worst_moment = std::max(worst_moment, std::abs(m - 1.0 / (j + 1)));
      }
    }
  check(worst_moment < 1e-12, "kernel moments " + sci(worst_moment));

  auto sp = make_problem("spiral2", 5e-3);
  sp.T = 0.6;
  sp.K = 3;
  {
    const auto cfg = sp.parareal_config(1);
    const auto run = run_parareal(*sp.problem, cfg, sp.problem->initial());
    const auto seq = sequential_fine(*cfg.fine, sp.problem->initial(), sp.H, sp.N());
    bool ok = !run.aborted;
    for (int k = 0; k <= run.completed; ++k)
      for (int n = 0; n <= k; ++n) ok = ok && bitwise(run.states[k][n], seq[n]);
    check(ok, "exactness prefix");
    const auto other = run_parareal(*sp.problem, sp.parareal_config(4), sp.problem->initial());
    bool same = other.states.size() == run.states.size();
    for (std::size_t k = 0; same && k < run.states.size(); ++k)
      for (std::size_t n = 0; n < run.states[k].size(); ++n) same = same && bitwise(run.states[k][n], other.states[k][n]);
    check(same, "thread determinism");
  }
  {
    auto naive = sp;
    naive.mode = PararealMode::naive;
    auto cfg = naive.parareal_config(1);
    cfg.coarse = cfg.fine;
    const auto run = run_parareal(*naive.problem, cfg, naive.problem->initial());
    const auto seq = sequential_fine(*cfg.fine, naive.problem->initial(), naive.H, naive.N());
    check(state_distance(run.states[1], seq) < 1e-12, "coarse=fine fixed point");
  }

  {
    auto s = make_problem("simple_spiral", 0.1);
    std::vector<double> hs, es;
    for (double h : {0.01, 0.005, 0.0025, 0.00125}) {
      const State u = propagate_fixed(*s.problem, RhsKind::full, s.problem->initial(), 0.0, 1.0, h);
      hs.push_back(h);
      es.push_back((u - s.problem->analytic(1.0)).norm());
    }
    const double p = fit_order(hs, es);
    check(std::abs(p - 4.0) < 0.2, "RK4 order " + std::to_string(p));
  }
  {
    auto f = make_problem("fpu", 1e-3);
    const double h = f.fine.h;
    std::vector<double> hs, es;
    const State u0 = f.problem->initial();
    const State ref = propagate_verlet(*f.problem, u0, 0.0, 0.05, h / 64);
    for (int m : {1, 2, 4, 8}) {
      const State u = propagate_verlet(*f.problem, u0, 0.0, 0.05, h / m);
      hs.push_back(h / m);
      es.push_back((u - ref).norm());
    }
    const double p = fit_order(hs, es);
    check(std::abs(p - 2.0) < 0.2, "Verlet order " + std::to_string(p));
    const State fwd = propagate_verlet(*f.problem, u0, 0.0, 1000 * h, h);
    const State back = propagate_verlet(*f.problem, fwd, 1000 * h, -1000 * h, h);
    check((back - u0).norm() < 1e-9, "Verlet reversibility " + sci((back - u0).norm()));
  }
  {
    const double eps = 1e-4;
    const auto s = make_problem("spiral2", eps);
    std::vector<double> etas, ph;
    for (double m : {5.0, 10.0, 20.0, 40.0}) {
      etas.push_back(m * eps);
      ph.push_back(harness::poincare_phase_component(s, s.problem->initial(), m * eps));
    }
    const double p = fit_order(etas, ph);
    check(p >= 2.0 && p <= 3.0, "fast suppression slope " + std::to_string(p));
  }

  Verdict v;
  v.pass = failed.empty();
  v.detail = failed.empty() ? "kernel moments, exactness prefix, determinism, fixed point, orders, reversibility, "
                              "fast suppression"
                            : "failed:";
  for (const auto& f : failed) v.detail += " " + f + ";";
  return v;
}

Verdict fpu_long(int workers) {
  set_alignment_warnings(false);
  auto full = make_problem("fpu", 1e-3);
  full.alignment.rhs = RhsKind::full;
  auto modified = full;
  modified.alignment.rhs = RhsKind::alignment;
  const auto a = run_spec(full, workers);
  const auto b = run_spec(modified, workers);
  const double ea = last(a.state), eb = b.state.back();
  Verdict v;
  v.pass = !a.aborted && !b.aborted && std::isfinite(eb) && eb < ea;
  v.detail = "final state error modified=" + sci(eb) + " full=" + sci(ea);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  bool strict = false, with_fpu = false;
  int workers = 0;
  std::vector<int> only;
  app.add_flag("--strict", strict, "nonzero exit status when a criterion fails");
  app.add_flag("--with-fpu", with_fpu, "include the long FPU run");
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  set_alignment_warnings(false);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"Table 1 naive iteration counts", table1_reproduction},
      {"Table 1 proposed-method row", [&] { return proposed_row(workers); }},
      {"spiral I slow error, plateau and alignment contrast", [&] { return spiral1(workers); }},
      {"spiral II slow error and state reduction", [&] { return spiral2(workers); }},
      {"stellar state error at iteration 4", [&] { return stellar(workers); }},
      {"forward alignment order on spiral II", forward_order},
      {"resonance window contrast", [&] { return resonance(workers); }},
      {"property suite", properties},
      {"FPU alignment variants over T=500", [&] { return fpu_long(workers); }},
  };

  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    if (id == 9 && !with_fpu && !selected.count(9)) {
      std::printf("SKIP %d %s: long run, enable with --with-fpu\n", id, criteria[i].first.c_str());
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("%s %d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
