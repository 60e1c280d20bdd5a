#include "osc_harness/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace osc::harness {

using nlohmann::json;

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    v.reset();
  else
    v = it->get<T>();
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["problem"] = c.problem;
  put(j, "epsilon", c.epsilon);
  put(j, "mode", c.mode);
  put(j, "K", c.K);
  put(j, "T", c.T);
  put(j, "H", c.H);
  put(j, "forward_variant", c.forward_variant);
  put(j, "alignment_rhs", c.alignment_rhs);
  put(j, "on_alignment_failure", c.on_alignment_failure);
  put(j, "resonance_windows", c.resonance_windows);
  put(j, "stop_tolerance", c.stop_tolerance);
  put(j, "fine_method", c.fine_method);
  put(j, "fine_h", c.fine_h);
  put(j, "fine_rtol", c.fine_rtol);
  put(j, "fine_atol", c.fine_atol);
  put(j, "eta", c.eta);
  put(j, "estimator", c.estimator);
  put(j, "macro", c.macro);
  put(j, "kernel_q", c.kernel_q);
  put(j, "kernel_p", c.kernel_p);
  put(j, "h_poincare", c.h_poincare);
  put(j, "micro_rtol", c.micro_rtol);
  put(j, "micro_atol", c.micro_atol);
  put(j, "h_phase", c.h_phase);
  put(j, "align_eta", c.align_eta);
  put(j, "align_tol", c.align_tol);
  put(j, "align_max_window", c.align_max_window);
  j["out_dir"] = c.out_dir;
  put(j, "workers", c.workers);
  return j;
}

ExperimentConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
  const json known = to_json(ExperimentConfig{});
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw ConfigurationError("unknown config key '" + it.key() + "'");
  ExperimentConfig c;
  try {
    c.schema_version = j.value("schema_version", kSchemaVersion);
    if (c.schema_version != kSchemaVersion)
      throw ConfigurationError("unsupported schema_version " + std::to_string(c.schema_version));
    c.problem = j.value("problem", c.problem);
    get(j, "epsilon", c.epsilon);
    get(j, "mode", c.mode);
    get(j, "K", c.K);
    get(j, "T", c.T);
    get(j, "H", c.H);
    get(j, "forward_variant", c.forward_variant);
    get(j, "alignment_rhs", c.alignment_rhs);
    get(j, "on_alignment_failure", c.on_alignment_failure);
    get(j, "resonance_windows", c.resonance_windows);
    get(j, "stop_tolerance", c.stop_tolerance);
    get(j, "fine_method", c.fine_method);
    get(j, "fine_h", c.fine_h);
    get(j, "fine_rtol", c.fine_rtol);
    get(j, "fine_atol", c.fine_atol);
    get(j, "eta", c.eta);
    get(j, "estimator", c.estimator);
    get(j, "macro", c.macro);
    get(j, "kernel_q", c.kernel_q);
    get(j, "kernel_p", c.kernel_p);
    get(j, "h_poincare", c.h_poincare);
    get(j, "micro_rtol", c.micro_rtol);
    get(j, "micro_atol", c.micro_atol);
    get(j, "h_phase", c.h_phase);
    get(j, "align_eta", c.align_eta);
    get(j, "align_tol", c.align_tol);
    get(j, "align_max_window", c.align_max_window);
    c.out_dir = j.value("out_dir", c.out_dir);
    get(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  return c;
}

template <class E>
E pick(const std::string& what, const std::string& v, std::initializer_list<std::pair<const char*, E>> table) {
  for (const auto& [name, e] : table)
    if (v == name) return e;
  std::string msg = "unknown " + what + " '" + v + "'; expected one of:";
  for (const auto& [name, e] : table) msg += std::string(" ") + name;
  throw ConfigurationError(msg);
}

}  // namespace

std::string emit_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigurationError("override must be key=value: " + assignment);
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json j = to_json(cfg);
  if (!j.contains(key)) throw ConfigurationError("unknown config key '" + key + "'");
  j[key] = value;
  cfg = from_json(j);
}

BenchmarkSpec build_spec(const ExperimentConfig& c) {
  BenchmarkSpec s = make_problem(c.problem, c.epsilon.value_or(0.0));
  if (c.mode)
    s.mode = pick<PararealMode>("mode", *c.mode,
                                {{"naive", PararealMode::naive},
                                 {"slow_only", PararealMode::slow_only},
                                 {"full_state", PararealMode::full_state}});
  if (c.K) s.K = *c.K;
  if (c.T) s.T = *c.T;
  if (c.H) s.H = *c.H;
  if (c.forward_variant)
    s.forward_variant = pick<ForwardVariant>("forward_variant", *c.forward_variant,
                                             {{"basic", ForwardVariant::basic}, {"improved", ForwardVariant::improved}});
  if (c.alignment_rhs)
    s.alignment.rhs = pick<RhsKind>("alignment_rhs", *c.alignment_rhs,
                                    {{"full", RhsKind::full},
                                     {"alignment", RhsKind::alignment},
                                     {"unperturbed", RhsKind::unperturbed}});
  if (c.on_alignment_failure)
    s.on_alignment_failure = pick<AlignmentFailurePolicy>(
        "on_alignment_failure", *c.on_alignment_failure,
        {{"abort", AlignmentFailurePolicy::abort}, {"naive_correction", AlignmentFailurePolicy::naive_correction}});
  if (c.resonance_windows) {
    s.resonance_windows.clear();
    for (auto [a, b] : *c.resonance_windows) s.resonance_windows.push_back({a, b});
  }
  if (c.stop_tolerance) s.stop_tolerance = *c.stop_tolerance;

  if (c.fine_method)
    s.fine.method = pick<FineMethod>("fine_method", *c.fine_method,
                                     {{"rk4", FineMethod::rk4},
                                      {"adaptive54", FineMethod::adaptive54},
                                      {"verlet", FineMethod::verlet},
                                      {"exact", FineMethod::exact}});
  if (c.fine_h) s.fine.h = s.h_fine = *c.fine_h;
  if (c.fine_rtol) s.fine.rtol = *c.fine_rtol;
  if (c.fine_atol) s.fine.atol = *c.fine_atol;

  if (c.eta) s.poincare.eta = *c.eta;
  if (c.estimator)
    s.poincare.estimator = pick<Estimator>("estimator", *c.estimator,
                                           {{"fe_chord", Estimator::fe_chord}, {"z_symmetric", Estimator::z_symmetric}});
  if (c.macro)
    s.poincare.macro = pick<MacroStepper>(
        "macro", *c.macro, {{"forward_euler", MacroStepper::forward_euler}, {"midpoint", MacroStepper::midpoint}, {"verlet", MacroStepper::verlet}});
  if (c.kernel_q || c.kernel_p) {
    const int q = c.kernel_q.value_or(s.poincare.kernel.smoothness());
    const int p = c.kernel_p.value_or(s.poincare.kernel.moments());
    s.poincare.kernel = q < 0 ? make_constant_kernel() : make_kernel(q, p);
  }
  if (c.h_poincare) s.poincare.micro.h = s.h_poincare = *c.h_poincare;
  if (c.micro_rtol) s.poincare.micro.rtol = *c.micro_rtol;
  if (c.micro_atol) s.poincare.micro.atol = *c.micro_atol;

  if (c.h_phase) s.alignment.h_phase = *c.h_phase;
  if (c.align_eta) s.alignment.initial_eta = *c.align_eta;
  if (c.align_tol) s.alignment.tol_factor = *c.align_tol;
  if (c.align_max_window) s.alignment.max_window = *c.align_max_window;
  return s;
}

}  // namespace osc::harness
