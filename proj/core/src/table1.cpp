#include "osc_parareal/table1.hpp"

#include <cmath>
#include <complex>

#include "osc_parareal/metrics.hpp"

namespace osc {

namespace {

using cplx = std::complex<long double>;

cplx amplification(ClassicalCoarse method, cplx z) {
  switch (method) {
    case ClassicalCoarse::explicit_euler:
      return 1.0L + z;
    case ClassicalCoarse::implicit_euler:
      return 1.0L / (1.0L - z);
    case ClassicalCoarse::trapezoidal:
      break;
  }
  return (1.0L + 0.5L * z) / (1.0L - 0.5L * z);
}

// Streams the iteration u^k_n = g u^k_{n-1} + (f - g) u^{k-1}_{n-1}; calls
// visit(k, err) after every iteration and stops when it returns false.
template <class Visit>
void stream_naive(ClassicalCoarse method, double eps, double H, int N, int K, const SpiralStudy& st, Visit visit) {
  const cplx lambda(st.alpha, 1.0L / eps);
  const cplx z = static_cast<long double>(H) * lambda;
  const cplx f = std::exp(z);
  const cplx g = amplification(method, z);
  std::vector<cplx> exact(N + 1), u(N + 1);
  for (int n = 0; n <= N; ++n) exact[n] = std::exp(static_cast<long double>(n) * z);
  u[0] = 1.0L;
  for (int n = 1; n <= N; ++n) u[n] = g * u[n - 1];
  auto sup_err = [&](int from) {
    long double m = 0;
    for (int n = from; n <= N; ++n) m = std::max(m, std::abs(u[n] - exact[n]));
    return static_cast<double>(m);
  };
  if (!visit(0, sup_err(0))) return;
  for (int k = 1; k <= K; ++k) {
    cplx old_prev = u[k - 1];
    for (int n = k; n <= N; ++n) {
      const cplx old = u[n];
      u[n] = g * u[n - 1] + (f - g) * old_prev;
      old_prev = old;
    }
    // nodes before k are unchanged and already exact up to rounding
    if (!visit(k, sup_err(0))) return;
  }
}

}  // namespace

int naive_spiral_iterations(ClassicalCoarse method, double eps, double H, const SpiralStudy& study) {
  const int N = static_cast<int>(std::lround(study.T / H));
  int found = N;
  stream_naive(method, eps, H, N, N, study, [&](int k, double err) {
    if (err < study.tol) {
      found = k;
      return false;
    }
    return true;
  });
  return found;
}

std::vector<double> naive_spiral_errors(ClassicalCoarse method, double eps, double H, int K,
                                        const SpiralStudy& study) {
  const int N = static_cast<int>(std::lround(study.T / H));
  std::vector<double> out;
  stream_naive(method, eps, H, N, std::min(K, N), study, [&](int, double err) {
    out.push_back(err);
    return true;
  });
  return out;
}

ProposedResult proposed_spiral_iterations(double eps, int K, int workers, const SpiralStudy& study) {
  auto spec = make_problem("simple_spiral", eps);
  spec.K = K;
  auto cfg = spec.parareal_config(workers);
  auto run = run_slow(*spec.problem, cfg, spec.problem->initial());
  const auto ref = reference_trajectory(spec, spec.grid(), std::nullopt);
  ProposedResult r;
  r.slow_errors = slow_sup_error(run, ref, *spec.problem);
  r.iterations = K;
  r.reached = false;
  for (std::size_t k = 1; k < r.slow_errors.size(); ++k)
    if (r.slow_errors[k] < study.tol) {
      r.iterations = static_cast<int>(k);
      r.reached = true;
      break;
    }
  return r;
}

std::vector<double> table1_epsilons() { return {0.2, 0.1, 0.05, 0.02, 0.01, 0.001}; }

Table1 compute_table1(int workers, const SpiralStudy& study) {
  Table1 t;
  t.eps = table1_epsilons();
  const std::pair<const char*, ClassicalCoarse> methods[] = {
      {"explicit Euler", ClassicalCoarse::explicit_euler},
      {"implicit Euler", ClassicalCoarse::implicit_euler},
      {"trapezoidal", ClassicalCoarse::trapezoidal},
  };
  for (bool fine_coarse : {true, false}) {
    for (const auto& [label, m] : methods) {
      Table1Row row;
      row.label = std::string(label) + (fine_coarse ? " H=eps/5" : " H=1/10");
      for (double e : t.eps) {
        const double H = fine_coarse ? e / 5.0 : 0.1;
        const int N = static_cast<int>(std::lround(study.T / H));
        const int k = naive_spiral_iterations(m, e, H, study);
        row.counts.push_back(k);
        row.capped.push_back(k >= N);
      }
      t.rows.push_back(std::move(row));
    }
  }
  Table1Row prop;
  prop.label = "proposed H=1/10";
  for (double e : t.eps) {
    const auto r = proposed_spiral_iterations(e, 3, workers, study);
    prop.counts.push_back(r.iterations);
    prop.capped.push_back(!r.reached);
  }
  t.rows.push_back(std::move(prop));
  return t;
}

}  // namespace osc
