// ilw_lab: runs one scenario per invocation and writes its artifacts.
//
//   ilw_lab <scenario> --config cfg.json [--out dir] [--seed n] [--threads k] [--strict]
//
// Exit codes: 0 all assertions passed, 1 assertion failure, 2 usage or config
// error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ilw/scenario.hpp"
#include "ilw/version.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool strict = false;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ilw::InputError("cannot read config " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Applies command-line overrides to the raw config before validation.
std::string apply_overrides(const std::string& text, const std::string& scenario, const Options& opt) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error&) {
    return text;  // parse_config reports it
  }
  if (!j.is_object()) return text;
  if (!j.contains("scenario")) j["scenario"] = scenario;
  if (j["scenario"] != scenario)
    throw ilw::InputError("config scenario '" + j["scenario"].dump() + "' does not match subcommand " + scenario);
  if (opt.seed) {
    if (scenario == "hessian_d")
      j["hessian_d"]["seed"] = *opt.seed;
    else if (j.contains("perturbation") || scenario == "perturb")
      j["perturbation"]["seed"] = *opt.seed;
  }
  if (!opt.out.empty()) j["outputs"]["dir"] = opt.out;
  return j.dump(2) + "\n";
}

void print_report(const ilw::ScenarioResult& r) {
  for (const auto& a : r.assertions)
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << "  value=" << ilw::format_number(a.value)
              << "  bound=" << ilw::format_number(a.bound) << "\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
}

int run(const std::string& scenario, const Options& opt) {
  ilw::ScenarioConfig cfg;
  try {
    cfg = ilw::parse_config(apply_overrides(read_file(opt.config), scenario, opt));
  } catch (const ilw::ConfigError& e) {
    for (const auto& v : e.violations()) std::cerr << "config error: " << v << "\n";
    return kUsage;
  } catch (const ilw::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  ilw::ScenarioResult result;
  try {
    result = ilw::run_scenario(cfg, {opt.threads, opt.strict});
  } catch (const ilw::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ilw::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  print_report(result);
  try {
    ilw::write_outputs(cfg, result, cfg.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kNumerical;
  }
  if (result.exit_code == kNumerical && result.summary.contains("error"))
    std::cerr << "numerical failure: " << result.summary["error"].get<std::string>() << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ILW soliton laboratory"};
  app.set_version_flag("--version", std::string(ilw::version_string()));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  for (const char* name : {"propagate", "collide", "perturb", "spectrum", "hessian_d", "limits", "convergence"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    sub->add_option("--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides outputs.dir)");
    sub->add_option("--seed", opt.seed, "seed for random perturbations / speed sampling");
    sub->add_option("--threads", opt.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", opt.strict, "treat warnings as errors");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  return run(chosen, opt);
}
