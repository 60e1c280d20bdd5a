#include "osc_parareal/problems.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace osc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

State rotate(const State& u, double scale, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  State out = u;
  out[0] = scale * (c * u[0] - s * u[1]);
  out[1] = scale * (s * u[0] + c * u[1]);
  return out;
}

FineConfig adaptive(double rtol, double atol, double h0) {
  FineConfig c;
  c.method = FineMethod::adaptive54;
  c.rtol = rtol;
  c.atol = atol;
  c.h = h0;
  return c;
}

BenchmarkSpec base_spec(ProblemPtr p, double T, double H, double eta, double h_fine, double h_poincare,
                        double rtol, double atol, int q) {
  const double eps = p->epsilon();
  BenchmarkSpec s;
  s.name = p->name();
  s.problem = std::move(p);
  s.T = T;
  s.H = H;
  s.K = 5;
  s.mode = PararealMode::full_state;
  s.fine = adaptive(rtol, atol, h_fine);
  s.h_fine = h_fine;
  s.poincare.eta = eta;
  s.poincare.micro = adaptive(rtol, atol, h_poincare);
  s.poincare.kernel = make_kernel(q, 1);
  s.h_poincare = h_poincare;
  s.alignment = AlignmentConfig::defaults(eps);
  return s;
}

BenchmarkSpec simple_spiral(double eps) {
  const double alpha = 0.1;
  ProblemDefinition d;
  d.name = "simple_spiral";
  d.dim = 2;
  d.epsilon = eps;
  d.horizon = 10.0;
  d.initial = make_state({1.0, 0.0});
  d.fast = [](const State& u) { return make_state({-u[1], u[0]}); };
  d.slow = [alpha](double, const State& u) { return State(alpha * u); };
  d.observables = SlowObservables{[](const State& u) { return make_state({u.head<2>().norm()}); }, 1};
  d.exact_flow = [alpha, eps](const State& u, double, double dt) { return rotate(u, std::exp(alpha * dt), dt / eps); };
  d.analytic = [alpha, eps](double t) { return rotate(make_state({1.0, 0.0}), std::exp(alpha * t), t / eps); };
  const double H = 0.1;
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 10.0, H, std::min(7.0 * eps, H / 4.0), eps / 200.0,
                     eps / 10.0, 1e-13, 1e-11, 4);
  s.mode = PararealMode::slow_only;
  s.K = 3;
  s.fine.method = FineMethod::exact;
  s.reference = ReferenceKind::analytic;
  return s;
}

BenchmarkSpec spiral1(double eps) {
  ProblemDefinition d;
  d.name = "spiral1";
  d.dim = 2;
  d.epsilon = eps;
  d.horizon = 2.0;
  d.initial = make_state({1.0, 0.0});
  d.fast = [](const State& u) {
    const double r = u.norm();
    return make_state({-r * u[1], r * u[0]});
  };
  d.slow = [](double, const State& u) { return State(u / u.norm()); };
  d.alignment = [eps](double, const State& u) {
    const double r = u.norm() / eps;
    return make_state({-r * u[1], r * u[0]});
  };
  d.observables = SlowObservables{[](const State& u) { return make_state({u.norm()}); }, 1};
  d.exact_flow = [eps](const State& u, double, double dt) {
    const double r0 = u.norm();
    return rotate(u, (r0 + dt) / r0, (r0 * dt + 0.5 * dt * dt) / eps);
  };
  d.analytic = [eps](double t) { return rotate(make_state({1.0, 0.0}), 1.0 + t, (t + 0.5 * t * t) / eps); };
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 2.0, 0.1, 7.0 * eps, eps / 200.0, eps / 10.0, 1e-13,
                     1e-11, 4);
  s.reference = ReferenceKind::analytic;
  return s;
}

BenchmarkSpec spiral2(double eps) {
  const double a = 0.2, b = 0.1;
  ProblemDefinition d;
  d.name = "spiral2";
  d.dim = 4;
  d.epsilon = eps;
  d.horizon = 2.0;
  d.initial = make_state({1.0, 0.0, 0.0, 1.0});
  d.fast = [a](const State& u) {
    const double w = kTwoPi * (1.0 + (1.0 - a * u[2]) * u[3]);
    return make_state({-w * u[1], w * u[0], 0.0, 0.0});
  };
  d.slow = [a, b](double, const State& u) { return make_state({b * u[0], b * u[1], 1.0, -a * u[3]}); };
  d.observables = SlowObservables{
      [](const State& u) { return make_state({u[0] * u[0] + u[1] * u[1], u[2], u[3]}); }, 3};
  d.exact_flow = [a, b, eps](const State& u, double, double dt) {
    const double e = std::exp(-a * dt);
    const double phase = kTwoPi / eps * (dt + u[3] * (dt * e - u[2] * (1.0 - e)));
    State out = rotate(u, std::exp(b * dt), phase);
    out[2] = u[2] + dt;
    out[3] = u[3] * e;
    return out;
  };
  d.analytic = [a, b, eps](double t) {
    const double ph = kTwoPi / eps * (1.0 + std::exp(-a * t)) * t;
    const double r = std::exp(b * t);
    return make_state({r * std::cos(ph), r * std::sin(ph), t, std::exp(-a * t)});
  };
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 2.0, 0.1, 7.0 * eps, eps / 200.0, eps / 10.0, 1e-13,
                     1e-11, 4);
  s.reference = ReferenceKind::analytic;
  return s;
}

BenchmarkSpec stellar(double eps) {
  const double a = 2.0, b = 1.0;
  ProblemDefinition d;
  d.name = "stellar";
  d.dim = 4;
  d.epsilon = eps;
  d.horizon = 14.0;
  d.initial = make_state({1.0, 0.0, 1.0, 0.0});
  d.fast = [a](const State& u) { return make_state({a * u[1], -a * u[0], u[3], -u[2]}); };
  d.slow = [a, b](double, const State& u) {
    return make_state({0.0, u[2] * u[2] / a, 0.0, 2.0 * u[0] * u[2] / b});
  };
  d.observables = SlowObservables{[](const State& u) {
                                    const double x1 = u[0], v1 = u[1], x2 = u[2], v2 = u[3];
                                    return make_state({x1 * x1 + v1 * v1, x2 * x2 + v2 * v2,
                                                       x1 * x2 * x2 + 2.0 * v1 * x2 * v2 - x1 * v2 * v2});
                                  },
                                  3};
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 14.0, 0.5, 20.0 * eps, eps / 100.0, eps / 10.0, 1e-13,
                     1e-11, 3);
  return s;
}

BenchmarkSpec volterra_lotka(double eps) {
  ProblemDefinition d;
  d.name = "volterra_lotka";
  d.dim = 3;
  d.epsilon = eps;
  d.horizon = 10.0;
  d.initial = make_state({1.0, 2.9, 1.0});
  d.fast = [](const State& u) {
    return make_state({u[0] * (1.0 - u[2] * u[1]), u[2] * u[1] * (u[0] - 1.0), 0.0});
  };
  d.slow = [](double, const State& u) { return make_state({0.0, 0.0, 0.2 * u[0]}); };
  d.observables = SlowObservables{[](const State& u) {
                                    return make_state(
                                        {u[2], u[0] - std::log(u[0]) + u[1] - std::log(u[1]) / u[2]});
                                  },
                                  2};
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 10.0, 0.5, 30.0 * eps, eps / 200.0, eps / 10.0, 1e-13,
                     1e-10, 3);
  return s;
}

BenchmarkSpec resonance(double eps) {
  auto freq = [](double z) { return kTwoPi * std::tanh(50.0 * (z - 4.5)); };
  ProblemDefinition d;
  d.name = "resonance";
  d.dim = 3;
  d.epsilon = eps;
  d.horizon = 7.0;
  d.initial = make_state({1.0, 0.0, 0.0});
  d.fast = [freq](const State& u) {
    const double w = freq(u[2]);
    return make_state({-w * u[1], w * u[0], 0.0});
  };
  d.slow = [](double, const State& u) { return make_state({0.5 * std::sin(u[2]) * u[0], 0.0, 1.0}); };
  d.observables =
      SlowObservables{[](const State& u) { return make_state({u[0] * u[0] + u[1] * u[1], u[2]}); }, 2};
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 7.0, 0.25, 15.0 * eps, eps / 200.0, eps / 10.0, 1e-13,
                     1e-11, 4);
  s.resonance_windows = {{4.25, 4.75}};
  return s;
}

// State layout (y1, y2, x1, x2, u1, u2, v1, v2).
BenchmarkSpec fpu(double eps) {
  auto springs = [eps](const State& s, double out[3]) {
    const double y[4] = {0.0, s[0], s[1], 0.0};
    const double x[4] = {0.0, s[2], s[3], 0.0};
    for (int i = 1; i <= 3; ++i) out[i - 1] = y[i] - eps * x[i] - y[i - 1] - eps * x[i - 1];
  };
  ProblemDefinition d;
  d.name = "fpu";
  d.dim = 8;
  d.epsilon = eps;
  d.horizon = 0.5 / eps;
  d.initial = make_state({1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.2, 0.0});
  d.fast = [](const State& s) { return make_state({0.0, 0.0, s[6], s[7], 0.0, 0.0, -s[2], -s[3]}); };
  d.slow = [springs](double, const State& s) {
    double dl[3];
    springs(s, dl);
    double c[3];
    for (int i = 0; i < 3; ++i) c[i] = dl[i] * dl[i] * dl[i];
    return make_state({s[4], s[5], 0.0, 0.0, -c[0] + c[1], -c[1] + c[2], c[0] + c[1], c[1] + c[2]});
  };
  d.alignment = [eps](double, const State& s) {
    return make_state({0.0, 0.0, s[6] / eps, s[7] / eps, 0.0, 0.0, -s[2] / eps, -s[3] / eps});
  };
  d.observables = SlowObservables{[](const State& s) {
                                    return make_state({s[2] * s[2] + s[6] * s[6], s[3] * s[3] + s[7] * s[7],
                                                       s[2] * s[3] + s[6] * s[7], s[0], s[1], s[4], s[5]});
                                  },
                                  7};
  d.partition = PartitionSplit{{0, 1, 2, 3}, {4, 5, 6, 7}};
  auto s = base_spec(std::make_shared<const OdeProblem>(d), 0.5 / eps, 0.25, 10.0 * eps, eps / 20.0, eps / 20.0,
                     1e-12, 1e-10, 4);
  s.fine = FineConfig{FineMethod::verlet, eps / 20.0, 1e-12, 1e-10};
  s.poincare.macro = MacroStepper::verlet;
  return s;
}

struct Entry {
  const char* name;
  double eps;
  BenchmarkSpec (*make)(double);
};

const Entry kCatalog[] = {
    {"simple_spiral", 0.1, simple_spiral}, {"spiral1", 1e-3, spiral1},   {"spiral2", 1e-3, spiral2},
    {"stellar", 1e-4, stellar},           {"volterra_lotka", 1e-3, volterra_lotka},
    {"resonance", 1e-4, resonance},       {"fpu", 1e-3, fpu},
};

const Entry& lookup(const std::string& name) {
  for (const auto& e : kCatalog)
    if (name == e.name) return e;
  std::ostringstream os;
  os << "unknown problem '" << name << "'; available:";
  for (const auto& e : kCatalog) os << ' ' << e.name;
  throw CatalogError(os.str());
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::mutex& key_mutex(const std::string& key) {
  static std::mutex guard;
  static std::map<std::string, std::unique_ptr<std::mutex>> table;
  std::lock_guard<std::mutex> lock(guard);
  auto& m = table[key];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

constexpr const char* kCacheVersion = "osc-parareal-reference 1";

std::string cache_key(const BenchmarkSpec& spec, const std::vector<double>& grid) {
  std::ostringstream os;
  os.precision(17);
  os << kCacheVersion << "\nname=" << spec.name << "\nepsilon=" << spec.problem->epsilon()
     << "\nmethod=" << static_cast<int>(spec.fine.method) << "\nh=" << spec.fine.h << "\nrtol=" << spec.fine.rtol
     << "\natol=" << spec.fine.atol << "\ngrid=" << grid.size();
  if (!grid.empty()) os << ' ' << grid.front() << ' ' << grid.back();
  std::uint64_t gh = 0;
  for (double t : grid) {
    std::ostringstream g;
    g.precision(17);
    g << t;
    gh = gh * 31 + fnv1a(g.str());
  }
  os << "\ngrid_hash=" << gh << '\n';
  return os.str();
}

bool read_cache(const std::filesystem::path& file, const std::string& header, int dim,
                std::vector<State>& out, std::size_t count) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  std::string text(header.size(), '\0');
  in.read(text.data(), static_cast<std::streamsize>(text.size()));
  if (!in || text != header) return false;
  std::vector<double> buf(count * dim);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!in) return false;
  out.assign(count, State(dim));
  for (std::size_t i = 0; i < count; ++i)
    for (int j = 0; j < dim; ++j) out[i][j] = buf[i * dim + j];
  return true;
}

void write_cache(const std::filesystem::path& file, const std::string& header, const std::vector<State>& xs) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& x : xs)
      out.write(reinterpret_cast<const char*>(x.data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace

int BenchmarkSpec::N() const { return static_cast<int>(std::lround(T / H)); }

std::vector<double> BenchmarkSpec::grid() const {
  std::vector<double> g(N() + 1);
  for (int n = 0; n <= N(); ++n) g[n] = n * H;
  return g;
}

PararealConfig BenchmarkSpec::parareal_config(int workers) const {
  PararealConfig c;
  c.T = T;
  c.H = H;
  c.N = N();
  c.K = std::min(K, c.N);
  c.mode = mode;
  c.coarse = std::make_shared<PoincareFlow>(problem, poincare);
  if (fine.method == FineMethod::exact)
    c.fine = std::make_shared<ExactFlow>(problem);
  else
    c.fine = std::make_shared<FineFlow>(problem, fine);
  c.alignment = alignment;
  c.forward_variant = forward_variant;
  c.resonance_windows = resonance_windows;
  c.on_alignment_failure = on_alignment_failure;
  c.stop_tolerance = stop_tolerance;
  c.workers = workers;
  return c;
}

CostModel BenchmarkSpec::cost_model() const {
  return CostModel{T, H, h_fine, poincare.eta, h_poincare, alignment.h_phase};
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& e : kCatalog) out.emplace_back(e.name);
  return out;
}

double default_epsilon(const std::string& name) { return lookup(name).eps; }

BenchmarkSpec make_problem(const std::string& name, double epsilon) {
  const auto& e = lookup(name);
  return e.make(epsilon > 0.0 ? epsilon : e.eps);
}

LinearSpiralCoarse::LinearSpiralCoarse(double alpha, double epsilon, ClassicalCoarse method)
    : alpha_(alpha), epsilon_(epsilon), method_(method) {}

State LinearSpiralCoarse::propagate(const State& u, double, double dt, StepCounter* cost) const {
  const std::complex<double> z = dt * std::complex<double>(alpha_, 1.0 / epsilon_);
  std::complex<double> g;
  switch (method_) {
    case ClassicalCoarse::explicit_euler:
      g = 1.0 + z;
      break;
    case ClassicalCoarse::implicit_euler:
      g = 1.0 / (1.0 - z);
      break;
    case ClassicalCoarse::trapezoidal:
      g = (1.0 + 0.5 * z) / (1.0 - 0.5 * z);
      break;
  }
  const std::complex<double> w = g * std::complex<double>(u[0], u[1]);
  if (cost) cost->add(1);
  return make_state({w.real(), w.imag()});
}

ExactFlow::ExactFlow(ProblemPtr problem) : problem_(std::move(problem)) {
  if (!problem_ || !problem_->has_exact_flow()) throw UnsupportedError("problem has no exact flow");
}

State ExactFlow::propagate(const State& u, double t0, double dt, StepCounter* cost) const {
  return propagate_exact(*problem_, u, t0, dt, cost);
}

std::optional<std::filesystem::path> default_cache_dir() {
  if (const char* dir = std::getenv("OSC_PARAREAL_CACHE"); dir && *dir) return std::filesystem::path(dir);
  return std::nullopt;
}

std::vector<State> reference_trajectory(const BenchmarkSpec& spec, const std::vector<double>& grid,
                                        const std::optional<std::filesystem::path>& cache_dir) {
  const auto& p = *spec.problem;
  for (double t : grid)
    if (t < -1e-12 || t > spec.T * (1.0 + 1e-12)) throw ConfigurationError("reference grid outside [0,T]");
  std::vector<State> out;
  if (spec.reference == ReferenceKind::analytic && p.has_analytic()) {
    for (double t : grid) out.push_back(p.analytic(t));
    return out;
  }
  const std::string header = cache_key(spec, grid);
  std::optional<std::filesystem::path> file;
  if (cache_dir) {
    std::ostringstream name;
    name << spec.name << '-' << std::hex << fnv1a(header) << ".ref";
    file = *cache_dir / name.str();
  }
  std::lock_guard<std::mutex> lock(key_mutex(header));
  if (file && read_cache(*file, header, p.dim(), out, grid.size())) return out;

  State u = p.initial();
  double t = 0.0;
  const bool exact = spec.fine.method == FineMethod::exact;
  for (double g : grid) {
    if (g != t) {
      double dt = g - t;
      if (std::abs(dt - spec.H) <= 1e-12 * spec.H) dt = spec.H;
      u = exact ? propagate_exact(p, u, t, dt) : propagate_with(p, RhsKind::full, spec.fine, u, t, dt);
    }
    t = g;
    out.push_back(u);
  }
  if (file) write_cache(*file, header, out);
  return out;
}

}  // namespace osc
