#include "ilw/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ilw {

namespace {

void check_index(int m, int lo) {
  if (m < lo || m > 3) {
    std::ostringstream os;
    os << "functional index " << m << " outside " << lo << "..3";
    throw InputError(os.str());
  }
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().spacing() * s;
}

// Ku and u_x share one forward transform.
struct Spectra {
  Field Ku;
  Field Du;
};

Spectra spectra(const Field& u, double delta) {
  const Grid& g = u.grid();
  std::vector<std::complex<double>> hat(g.half_size());
  g.forward(u.values(), hat);
  const Multiplier km = Multiplier::tilbert_dx(g, delta);
  const Multiplier dm = Multiplier::derivative(g, 1);
  const auto k = km.half_symbol();
  const auto d = dm.half_symbol();
  std::vector<std::complex<double>> tmp(hat.size());
  Spectra s{Field(g), Field(g)};
  for (std::size_t i = 0; i < hat.size(); ++i) tmp[i] = k[i] * hat[i];
  g.inverse(tmp, s.Ku.values());
  for (std::size_t i = 0; i < hat.size(); ++i) tmp[i] = d[i] * hat[i];
  g.inverse(tmp, s.Du.values());
  return s;
}

Field apply_K(const Field& f, double delta) { return tilbert_dx(f, delta); }

Field apply_DD(const Field& f) { return derivative(derivative(f, 1), 1); }

}  // namespace

double eval_H(int m, const Field& u, double delta, H3Form form) {
  check_index(m, 0);
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  const double h = u.grid().spacing();
  double s = 0.0;
  switch (m) {
    case 0:
      return integrate(u);
    case 1:
      for (double v : u.values()) s += v * v;
      return 0.5 * h * s;
    case 2: {
      const Field Ku = apply_K(u, delta);
      for (int j = 0; j < u.size(); ++j) {
        const double v = u[j];
        s += v * v * v / 3.0 + 0.5 * v * Ku[j] + v * v / (2.0 * delta);
      }
      return -h * s;
    }
    default: {
      const Spectra sp = spectra(u, delta);
      const double ux2 = form == H3Form::conserved ? 0.125 : 0.0;
      for (int j = 0; j < u.size(); ++j) {
        const double v = u[j];
        const double k = sp.Ku[j];
        s += 0.25 * v * v * v * v + 0.75 * v * v * k + 0.375 * k * k + v * v * v / (3.0 * delta) +
             v * k / (2.0 * delta) + v * v / (8.0 * delta * delta) + ux2 * sp.Du[j] * sp.Du[j];
      }
      return h * s;
    }
  }
}

Field grad_H(int m, const Field& u, double delta, H3Form form) {
  check_index(m, 1);
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  const Grid& g = u.grid();
  if (m == 1) return u;
  const Field Ku = apply_K(u, delta);
  Field out(g);
  if (m == 2) {
    for (int j = 0; j < u.size(); ++j) out[j] = -(u[j] * u[j] + Ku[j] + u[j] / delta);
    return out;
  }
  const Field u2 = hadamard(u, u);
  const Field Ku2 = apply_K(u2, delta);
  const Field KKu = apply_K(Ku, delta);
  for (int j = 0; j < u.size(); ++j) {
    const double v = u[j];
    out[j] = v * v * v + 0.75 * (2.0 * v * Ku[j] + Ku2[j]) + 0.75 * KKu[j] + v * v / delta + Ku[j] / delta +
             v / (4.0 * delta * delta);
  }
  if (form == H3Form::conserved) out.axpy(-0.25, apply_DD(u));
  return out;
}

Field hessian_apply(int m, const Field& u, const Field& z, double delta, H3Form form) {
  check_index(m, 1);
  require_same_grid(u.grid(), z.grid(), "hessian_apply");
  if (m == 1) return z;
  const Grid& g = u.grid();
  const Field Kz = apply_K(z, delta);
  Field out(g);
  if (m == 2) {
    for (int j = 0; j < u.size(); ++j) out[j] = -(2.0 * u[j] * z[j] + Kz[j] + z[j] / delta);
    return out;
  }
  const Field Ku = apply_K(u, delta);
  const Field Kuz = apply_K(hadamard(u, z), delta);
  const Field KKz = apply_K(Kz, delta);
  for (int j = 0; j < u.size(); ++j) {
    const double v = u[j];
    out[j] = 3.0 * v * v * z[j] + 1.5 * (z[j] * Ku[j] + v * Kz[j] + Kuz[j]) + 0.75 * KKz[j] +
             2.0 * v * z[j] / delta + Kz[j] / delta + z[j] / (4.0 * delta * delta);
  }
  if (form == H3Form::conserved) out.axpy(-0.25, apply_DD(z));
  return out;
}

double el_residual(const Field& u, double c, double delta) {
  const Field Ku = apply_K(u, delta);
  Field r(u.grid());
  for (int j = 0; j < u.size(); ++j) r[j] = Ku[j] + (1.0 / delta - c) * u[j] + u[j] * u[j];
  return l2_norm(r);
}

double el_residual(const SolitonParams& p, const Grid& g) { return el_residual(sample_soliton(p, g), p.c, p.delta); }

// ---------------------------------------------------------------- multipliers

namespace {
void check_speeds(const std::vector<double>& c) {
  if (c.empty()) throw InputError("at least one speed is required");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0) || !std::isfinite(c[i])) throw InputError("speeds must be positive");
    if (i > 0 && !(c[i - 1] < c[i])) throw InputError("speeds must be increasing");
  }
}

// Coefficients of prod (x + c_m), highest degree first.
std::vector<double> expand(const std::vector<double>& c) {
  std::vector<double> poly{1.0};
  for (double r : c) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] += r * poly[i];
    }
    poly = std::move(next);
  }
  return poly;
}
}  // namespace

MultiplierSet vieta(const std::vector<double>& speeds) {
  check_speeds(speeds);
  const auto poly = expand(speeds);
  return MultiplierSet{std::vector<double>(poly.begin() + 1, poly.end())};
}

double MultiplierSet::reconstruction_defect(const std::vector<double>& speeds) const {
  const auto poly = expand(speeds);
  if (poly.size() != mu.size() + 1) return std::numeric_limits<double>::infinity();
  double worst = std::abs(poly[0] - 1.0);
  for (std::size_t m = 0; m < mu.size(); ++m) {
    const double scale = std::max(1.0, std::abs(poly[m + 1]));
    worst = std::max(worst, std::abs(poly[m + 1] - mu[m]) / scale);
  }
  return worst;
}

namespace {
// x - sin x without cancellation for small x
double x_minus_sin(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))));
  }
  return x - std::sin(x);
}
}  // namespace

double G_formula(const SolitonParams& p) {
  const double th = 2.0 * p.kappa * p.delta;
  const double s = std::sin(th);
  return 4.0 * p.delta * (p.c * s * s / x_minus_sin(2.0 * th) + p.kappa);
}

// ---------------------------------------------------------------- Lyapunov functionals

double eval_lyapunov(const Field& u, const std::vector<double>& mu, double delta, H3Form form) {
  const int n = static_cast<int>(mu.size());
  if (n < 1 || n > 2) throw InputError("Lyapunov functionals are available for n = 1, 2");
  double s = eval_H(n + 1, u, delta, form);
  for (int m = 1; m <= n; ++m) s += mu[m - 1] * eval_H(n + 1 - m, u, delta, form);
  return s;
}

Field grad_lyapunov(const Field& u, const std::vector<double>& mu, double delta, H3Form form) {
  const int n = static_cast<int>(mu.size());
  if (n < 1 || n > 2) throw InputError("Lyapunov functionals are available for n = 1, 2");
  Field g = grad_H(n + 1, u, delta, form);
  for (int m = 1; m <= n; ++m) g.axpy(mu[m - 1], grad_H(n + 1 - m, u, delta, form));
  return g;
}

double eval_S2(const Field& u, double c1, double c2, double delta, H3Form form) {
  return eval_lyapunov(u, vieta({c1, c2}).mu, delta, form);
}

Field grad_S2(const Field& u, double c1, double c2, double delta, H3Form form) {
  return grad_lyapunov(u, vieta({c1, c2}).mu, delta, form);
}

ConstraintTargets constraint_targets(const Field& reference, int n, double delta) {
  if (n < 1 || n > 2) throw InputError("constraint count must be 1 or 2");
  ConstraintTargets t;
  for (int j = 1; j <= n; ++j) t.values.push_back(eval_H(j, reference, delta));
  return t;
}

double eval_augmented(const Field& u, double C, const ConstraintTargets& targets, double c1, double c2,
                      double delta, H3Form form) {
  if (!(C > 0.0)) throw InputError("penalty constant must be positive");
  double pen = 0.0;
  for (std::size_t j = 0; j < targets.values.size(); ++j) {
    const double d = eval_H(static_cast<int>(j) + 1, u, delta, form) - targets.values[j];
    pen += d * d;
  }
  return eval_S2(u, c1, c2, delta, form) + 0.5 * C * pen;
}

double poisson_bracket(int i, int j, const Field& u, double delta, H3Form form) {
  const Field gi = i == 0 ? Field(u.grid(), std::vector<double>(u.size(), 1.0)) : grad_H(i, u, delta, form);
  const Field gj = j == 0 ? Field(u.grid(), std::vector<double>(u.size(), 1.0)) : grad_H(j, u, delta, form);
  return inner_product(gi, derivative(gj, 1));
}

double soliton_h3_eigenvalue(const SolitonParams& p) {
  return 0.75 * p.c * p.c - p.c / (2.0 * p.delta) - 0.25 * p.a * p.a;
}

std::vector<double> critical_multipliers(double c1, double c2, double delta) {
  check_speeds({c1, c2});
  const double l1 = soliton_h3_eigenvalue(solve_transcendental(c1, delta));
  const double l2 = soliton_h3_eigenvalue(solve_transcendental(c2, delta));
  const double mu1 = (l2 - l1) / (c2 - c1);
  return {mu1, mu1 * c1 - l1};
}

}  // namespace ilw
