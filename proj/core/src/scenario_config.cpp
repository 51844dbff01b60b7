#include <cmath>
#include <sstream>

#include "ilw/scenario.hpp"

namespace ilw {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) {
    if (!s.empty()) s += "; ";
    s += e;
  }
  return s;
}

using json = nlohmann::json;

// Collects violations instead of throwing on the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  const json* section(const json& root, const char* key, bool required) {
    if (!root.contains(key)) {
      if (required) errors_.push_back(std::string("missing field '") + key + "'");
      return nullptr;
    }
    if (!root[key].is_object()) {
      errors_.push_back(std::string("'") + key + "' must be an object");
      return nullptr;
    }
    return &root[key];
  }

  template <typename T>
  void get(const json* obj, const std::string& path, const char* key, T& out, bool required = false) {
    const std::string full = path.empty() ? std::string(key) : path + "." + key;
    if (!obj || !obj->contains(key)) {
      if (required) errors_.push_back("missing field '" + full + "'");
      return;
    }
    try {
      out = (*obj)[key].get<T>();
    } catch (const json::exception&) {
      errors_.push_back("field '" + full + "' has the wrong type");
    }
  }

  void positive(double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) errors_.push_back(name + " must be positive");
  }

  void fail(std::string msg) { errors_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : InputError("invalid config: " + join(violations)), violations_(std::move(violations)) {}

const char* to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::propagate: return "propagate";
    case ScenarioKind::collide: return "collide";
    case ScenarioKind::perturb: return "perturb";
    case ScenarioKind::spectrum: return "spectrum";
    case ScenarioKind::hessian_d: return "hessian_d";
    case ScenarioKind::limits: return "limits";
    case ScenarioKind::convergence: return "convergence";
  }
  return "?";
}

std::optional<ScenarioKind> scenario_from_string(std::string_view name) noexcept {
  for (auto k : {ScenarioKind::propagate, ScenarioKind::collide, ScenarioKind::perturb, ScenarioKind::spectrum,
                 ScenarioKind::hessian_d, ScenarioKind::limits, ScenarioKind::convergence})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed config: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"config must be a JSON object"});

  std::vector<std::string> errors;
  Reader r(errors);
  ScenarioConfig cfg;
  cfg.source = std::string(text);

  std::string name;
  r.get(&root, "", "scenario", name, true);
  if (name.empty() && root.contains("scenario")) r.fail("scenario must be a non-empty string");
  if (!name.empty()) {
    if (auto k = scenario_from_string(name))
      cfg.scenario = *k;
    else
      r.fail("unknown scenario '" + name + "'");
  }
  const ScenarioKind kind = cfg.scenario;
  const bool evolving =
      kind == ScenarioKind::propagate || kind == ScenarioKind::collide || kind == ScenarioKind::perturb;
  const bool needs_grid = kind != ScenarioKind::hessian_d && kind != ScenarioKind::limits;

  if (const json* g = r.section(root, "grid", needs_grid && !name.empty())) {
    r.get(g, "grid", "N", cfg.N, true);
    r.get(g, "grid", "L", cfg.L, true);
    if (cfg.N % 2 != 0 || cfg.N < 16) r.fail("grid.N must be even and at least 16");
    r.positive(cfg.L, "grid.L");
  }

  if (const json* p = r.section(root, "physics", false)) {
    r.get(p, "physics", "delta", cfg.delta);
    r.get(p, "physics", "speeds", cfg.speeds);
    cfg.positions.assign(cfg.speeds.size(), 0.0);
    r.get(p, "physics", "positions", cfg.positions);
  }
  r.positive(cfg.delta, "physics.delta");
  for (double c : cfg.speeds) r.positive(c, "every speed");
  for (std::size_t i = 1; i < cfg.speeds.size(); ++i)
    if (!(cfg.speeds[i - 1] < cfg.speeds[i])) {
      r.fail("speeds must be increasing");
      break;
    }
  if (cfg.positions.size() != cfg.speeds.size()) r.fail("physics.positions must match physics.speeds in length");
  if (kind == ScenarioKind::collide && cfg.speeds.size() != 2) r.fail("collide needs exactly two speeds");
  if (kind == ScenarioKind::perturb && (cfg.speeds.empty() || cfg.speeds.size() > 2))
    r.fail("perturb needs one or two speeds");
  if (kind == ScenarioKind::propagate && cfg.speeds.empty()) r.fail("propagate needs at least one speed");

  if (const json* e = r.section(root, "evolve", evolving)) {
    r.get(e, "evolve", "dt", cfg.evolve.dt, true);
    r.get(e, "evolve", "T", cfg.evolve.T, true);
    r.get(e, "evolve", "dealias", cfg.evolve.dealias);
    r.get(e, "evolve", "record_stride", cfg.evolve.record_stride);
    r.get(e, "evolve", "tail_watch", cfg.evolve.tail_watch);
    r.get(e, "evolve", "peak_threshold", cfg.evolve.peak_threshold);
    r.positive(cfg.evolve.dt, "evolve.dt");
    r.positive(cfg.evolve.T, "evolve.T");
    if (cfg.evolve.dt > cfg.evolve.T) r.fail("evolve.dt must not exceed evolve.T");
    if (cfg.evolve.record_stride < 1) r.fail("evolve.record_stride must be positive");
    r.positive(cfg.evolve.peak_threshold, "evolve.peak_threshold");
  }

  if (const json* p = r.section(root, "perturbation", kind == ScenarioKind::perturb)) {
    r.get(p, "perturbation", "kind", cfg.perturbation.kind);
    r.get(p, "perturbation", "amplitude", cfg.perturbation.amplitude, true);
    if (p->contains("seed")) {
      std::uint64_t s = 0;
      r.get(p, "perturbation", "seed", s);
      cfg.perturbation.seed = s;
    } else if (kind == ScenarioKind::perturb) {
      r.fail("missing field 'perturbation.seed'");
    }
    r.get(p, "perturbation", "mode", cfg.perturbation.mode);
    r.get(p, "perturbation", "bandwidth", cfg.perturbation.bandwidth);
    if (cfg.perturbation.kind != "mode" && cfg.perturbation.kind != "random_smooth")
      r.fail("perturbation.kind must be 'mode' or 'random_smooth'");
    r.positive(cfg.perturbation.amplitude, "perturbation.amplitude");
    r.positive(cfg.perturbation.bandwidth, "perturbation.bandwidth");
    if (cfg.perturbation.mode < 1) r.fail("perturbation.mode must be at least 1");
  }

  if (const json* s = r.section(root, "spectrum", false)) {
    r.get(s, "spectrum", "operator", cfg.spectrum.op);
    r.get(s, "spectrum", "penalty", cfg.spectrum.penalty);
    r.get(s, "spectrum", "separation", cfg.spectrum.separation);
    r.get(s, "spectrum", "critical_multipliers", cfg.spectrum.critical_multipliers);
    r.positive(cfg.spectrum.penalty, "spectrum.penalty");
    r.positive(cfg.spectrum.separation, "spectrum.separation");
  }
  if (kind == ScenarioKind::spectrum) {
    const auto& op = cfg.spectrum.op;
    if (op != "L1" && op != "L2" && op != "T11" && op != "T12" && op != "S2pp" && op != "augmented")
      r.fail("spectrum.operator must be one of L1, L2, T11, T12, S2pp, augmented");
    const std::size_t need = (op == "L1" || op == "L2") ? 1 : 2;
    if (cfg.speeds.size() != need)
      r.fail("spectrum.operator " + op + " needs " + std::to_string(need) + " speed(s)");
  }

  if (const json* h = r.section(root, "hessian_d", false)) {
    r.get(h, "hessian_d", "n_max", cfg.hessian.n_max);
    r.get(h, "hessian_d", "samples", cfg.hessian.samples);
    r.get(h, "hessian_d", "seed", cfg.hessian.seed);
    r.get(h, "hessian_d", "c_min", cfg.hessian.c_min);
    r.get(h, "hessian_d", "c_max", cfg.hessian.c_max);
    if (cfg.hessian.n_max < 1 || cfg.hessian.n_max > 8) r.fail("hessian_d.n_max must lie in 1..8");
    if (cfg.hessian.samples < 1) r.fail("hessian_d.samples must be positive");
    r.positive(cfg.hessian.c_min, "hessian_d.c_min");
    if (!(cfg.hessian.c_max > cfg.hessian.c_min)) r.fail("hessian_d.c_max must exceed c_min");
  }

  if (const json* l = r.section(root, "limits", false)) r.get(l, "limits", "xi", cfg.limits_xi);
  if (kind == ScenarioKind::limits && cfg.limits_xi.empty())
    cfg.limits_xi = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 3.0, 10.0, 30.0};

  if (const json* c = r.section(root, "convergence", false)) {
    r.get(c, "convergence", "dt_list", cfg.convergence.dt_list);
    r.get(c, "convergence", "n_list", cfg.convergence.n_list);
    r.get(c, "convergence", "T", cfg.convergence.T);
    r.positive(cfg.convergence.T, "convergence.T");
    if (cfg.convergence.dt_list.size() < 2) r.fail("convergence.dt_list needs at least two steps");
    for (double dt : cfg.convergence.dt_list) r.positive(dt, "every convergence dt");
    for (int n : cfg.convergence.n_list)
      if (n % 2 != 0 || n < 16) r.fail("convergence.n_list entries must be even and at least 16");
  }

  if (const json* o = r.section(root, "outputs", false)) r.get(o, "outputs", "dir", cfg.output_dir);
  if (root.contains("tolerance")) {
    r.get(&root, "", "tolerance", cfg.tolerance);
    r.positive(cfg.tolerance, "tolerance");
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

}  // namespace ilw
