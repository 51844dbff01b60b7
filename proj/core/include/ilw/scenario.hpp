#pragma once

// Experiment configs, modulation fitting, scenario runners and output files
// behind the ilw_lab command-line tool. The config grammar is described in
// docs/config.md.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ilw/evolve.hpp"
#include "ilw/spectral.hpp"

namespace ilw {

enum class ScenarioKind { propagate, collide, perturb, spectrum, hessian_d, limits, convergence };

const char* to_string(ScenarioKind kind) noexcept;
std::optional<ScenarioKind> scenario_from_string(std::string_view name) noexcept;

struct PerturbationSpec {
  std::string kind = "random_smooth";  // or "mode"
  double amplitude = 1e-3;             // H1 norm of the perturbation
  std::optional<std::uint64_t> seed;
  int mode = 4;
  /// Highest frequency |xi| carried by random_smooth perturbations.
  double bandwidth = 0.5;
};

struct SpectrumSpec {
  std::string op = "L1";  // L1, L2, T11, T12, S2pp, augmented
  double penalty = 1e3;
  double separation = 40.0;
  /// Use multipliers that make the constituents exact critical points
  /// instead of the Vieta ones.
  bool critical_multipliers = false;
};

struct HessianSpec {
  int n_max = 5;
  int samples = 10;
  std::uint64_t seed = 1;
  double c_min = 0.2;
  double c_max = 4.0;
};

struct ConvergenceSpec {
  std::vector<double> dt_list{0.04, 0.02, 0.01, 0.005};
  std::vector<int> n_list{64, 128, 256, 512};
  double T = 2.0;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::propagate;
  int N = 1024;
  double L = 100.0;
  double delta = 1.0;
  std::vector<double> speeds{1.0};
  std::vector<double> positions{0.0};
  EvolveConfig evolve;
  PerturbationSpec perturbation;
  SpectrumSpec spectrum;
  HessianSpec hessian;
  std::vector<double> limits_xi;
  ConvergenceSpec convergence;
  std::string output_dir = "out";
  /// Scenario tolerances (pinned defaults; see docs/config.md).
  double tolerance = 1e-6;
  /// Original config text, echoed into config.echo.
  std::string source;
};

/// Thrown by parse_config with every violation found.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

ScenarioConfig parse_config(std::string_view text);

struct ModulationFit {
  std::vector<double> positions;
  /// Orthogonality residuals <u - U, d_{x_j} U> at the final iterate.
  std::vector<double> residuals;
  bool converged = false;
  int iterations = 0;
  std::string diagnostic;
};

/// Newton iteration with step halving for positions x_j such that u - U(.; x)
/// is orthogonal to each translation mode of U = sum_j Q_{c_j}(. - x_j).
ModulationFit modulate(const Field& u, const std::vector<double>& speeds, double delta,
                       const std::vector<double>& initial_positions, int max_iterations = 50);

/// U = sum_j Q_{c_j}(x - x_j) on the grid of `like`.
Field soliton_family(const Grid& g, const std::vector<double>& speeds, double delta,
                     const std::vector<double>& positions);

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
};

struct RunOptions {
  int threads = 1;
  bool strict = false;
};

struct ScenarioResult {
  std::vector<Assertion> assertions;
  std::vector<TraceRecord> trace;
  std::vector<double> spectrum;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
  /// 0 pass, 1 assertion failure, 3 numerical failure
  int exit_code = 0;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Writes trace.csv, spectrum.csv, summary.json and config.echo into `dir`.
void write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result, const std::filesystem::path& dir);

/// CSV text for a trace (header only when empty).
std::string trace_csv(const std::vector<TraceRecord>& records);
std::string spectrum_csv(const std::vector<double>& eigenvalues);
/// %.17g
std::string format_number(double v);

/// Mean-free perturbation with H1 norm `amplitude`.
Field make_perturbation(const Grid& g, const PerturbationSpec& spec);

}  // namespace ilw
