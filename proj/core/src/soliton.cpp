#include "ilw/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ilw {

double SolitonParams::peak() const noexcept { return a * std::tan(0.5 * a * delta); }

SolitonParams solve_transcendental(double c, double delta, double tol) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("soliton speed must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("delta must be positive");
  if (!(tol > 0.0) || tol > 1e-10) throw InputError("tolerance must lie in (0, 1e-10]");

  // theta = a delta, g(theta) = c delta - (1 - theta cot theta), decreasing on (0, pi)
  const double target = c * delta;
  auto g = [target](double th) { return target - detail::one_minus_tcot(th); };
  double lo = 0.0;
  double hi = std::numbers::pi;
  if (c * delta == 1.0) {
    lo = hi = 0.5 * std::numbers::pi;
  }
  for (int it = 0; it < 2000 && lo < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  if (!(theta > 0.0) || !(theta < std::numbers::pi))
    throw NumericalError("transcendental relation failed to bracket");

  SolitonParams p;
  p.c = c;
  p.delta = delta;
  p.a = theta / delta;
  p.kappa = 0.5 * p.a;
  return p;
}

SolitonParams make_soliton(double c, double delta, double x0) {
  SolitonParams p = solve_transcendental(c, delta);
  p.x0 = x0;
  return p;
}

double soliton_profile(const SolitonParams& p, double s) noexcept {
  const double th = p.theta();
  const double e = std::exp(-p.a * std::abs(s));
  return 2.0 * p.a * std::sin(th) * e / (1.0 + e * e + 2.0 * std::cos(th) * e);
}

double wrap_periodic(double s, double length) noexcept {
  double r = s - length * std::floor(s / length + 0.5);
  if (r >= 0.5 * length) r -= length;
  return r;
}

Field sample_soliton(const SolitonParams& p, const Grid& g, double t, Diagnostics* diag) {
  if (diag && std::exp(-0.5 * p.a * g.length()) >= 1e-13) {
    std::ostringstream os;
    os << "box length " << g.length() << " too short for soliton c=" << p.c << " (exp(-aL/2) = "
       << std::exp(-0.5 * p.a * g.length()) << ")";
    diag->warn(os.str());
  }
  const double center = p.x0 + p.c * t;
  return Field::sample(g, [&](double x) { return soliton_profile(p, wrap_periodic(x - center, g.length())); });
}

Field soliton_dc(const SolitonParams& p, const Grid& g) {
  const double h = 1e-5 * p.c;
  if (!(p.c - h > 0.0)) throw InputError("speed too small for the difference step");
  SolitonParams plus = solve_transcendental(p.c + h, p.delta);
  SolitonParams minus = solve_transcendental(p.c - h, p.delta);
  plus.x0 = minus.x0 = p.x0;
  Field d = sample_soliton(plus, g) - sample_soliton(minus, g);
  d *= 1.0 / (2.0 * h);
  return d;
}

void MultiSolitonSpec::validate() const {
  if (entries.empty()) throw InputError("at least one soliton is required");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i].c > 0.0)) throw InputError("soliton speeds must be positive");
    if (!std::isfinite(entries[i].x0)) throw InputError("soliton positions must be finite");
    if (i > 0 && !(entries[i - 1].c < entries[i].c))
      throw InputError("soliton speeds must be strictly increasing");
  }
}

std::vector<double> MultiSolitonSpec::speeds() const {
  std::vector<double> c;
  for (const auto& e : entries) c.push_back(e.c);
  return c;
}

Superposition superpose(const MultiSolitonSpec& spec, double delta, const Grid& g, double t, Diagnostics* diag) {
  spec.validate();
  Superposition out{Field(g), {}, 0.0, 0.0};
  double amin = std::numeric_limits<double>::infinity();
  for (const auto& e : spec.entries) {
    SolitonParams p = solve_transcendental(e.c, delta);
    p.x0 = e.x0;
    out.field += sample_soliton(p, g, t, diag);
    out.params.push_back(p);
    amin = std::min(amin, p.a);
  }
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.params.size(); ++i)
    for (std::size_t j = i + 1; j < out.params.size(); ++j) {
      const double ci = out.params[i].x0 + out.params[i].c * t;
      const double cj = out.params[j].x0 + out.params[j].c * t;
      sep = std::min(sep, std::abs(wrap_periodic(ci - cj, g.length())));
    }
  if (out.params.size() == 1) sep = 0.5 * g.length();
  out.min_separation = sep;
  out.scaled_separation = sep * amin;
  return out;
}

}  // namespace ilw
