#include <cstdio>
#include <fstream>
#include <sstream>

#include "ilw/scenario.hpp"
#include "ilw/version.hpp"

namespace ilw {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const std::vector<TraceRecord>& records) {
  std::size_t max_peaks = 0;
  bool tail = false;
  for (const auto& r : records) {
    max_peaks = std::max(max_peaks, r.peaks.size());
    tail = tail || r.tail != 0.0;
  }
  std::ostringstream os;
  os << "t,H0,H1,H2,H3,n_peaks";
  for (std::size_t i = 1; i <= max_peaks; ++i) os << ",peak" << i << "_pos,peak" << i << "_h";
  os << ",sobolev_half";
  if (tail) os << ",tail";
  os << '\n';
  for (const auto& r : records) {
    os << format_number(r.t);
    for (double h : r.H) os << ',' << format_number(h);
    os << ',' << r.peaks.size();
    for (std::size_t i = 0; i < max_peaks; ++i) {
      if (i < r.peaks.size())
        os << ',' << format_number(r.peaks[i].position) << ',' << format_number(r.peaks[i].height);
      else
        os << ",,";
    }
    os << ',' << format_number(r.sobolev_half);
    if (tail) os << ',' << format_number(r.tail);
    os << '\n';
  }
  return os.str();
}

std::string spectrum_csv(const std::vector<double>& eigenvalues) {
  std::ostringstream os;
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) os << i << ',' << format_number(eigenvalues[i]) << '\n';
  return os.str();
}

namespace {
void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}
}  // namespace

void write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  write_file(dir / "trace.csv", trace_csv(result.trace));
  write_file(dir / "spectrum.csv", spectrum_csv(result.spectrum));
  write_file(dir / "config.echo", cfg.source);

  nlohmann::json s = result.summary;
  s["scenario"] = to_string(cfg.scenario);
  s["version"] = std::string(version_string());
  s["exit_code"] = result.exit_code;
  s["warnings"] = result.warnings;
  nlohmann::json asserts = nlohmann::json::array();
  bool all = true;
  for (const auto& a : result.assertions) {
    asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"value", a.value}, {"bound", a.bound}});
    all = all && a.passed;
  }
  s["assertions"] = asserts;
  s["passed"] = all;
  try {
    s["config"] = nlohmann::json::parse(cfg.source, nullptr, true, true);
  } catch (const nlohmann::json::exception&) {
    s["config"] = cfg.source;
  }
  write_file(dir / "summary.json", s.dump(2) + "\n");
}

}  // namespace ilw
