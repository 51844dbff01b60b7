#include "ilw/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ilw {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void dealias_23(std::span<std::complex<double>> half_spectrum, int n) {
  for (std::size_t k = 0; k < half_spectrum.size(); ++k)
    if (3 * static_cast<long>(k) >= n) half_spectrum[k] = 0.0;
}

namespace {

// Spectrum of u^2, optionally truncated.
std::vector<std::complex<double>> square_hat(const Field& u, bool dealias) {
  const Grid& g = u.grid();
  std::vector<double> sq(u.size());
  for (int j = 0; j < u.size(); ++j) sq[j] = u[j] * u[j];
  std::vector<std::complex<double>> hat(g.half_size());
  g.forward(sq, hat);
  if (dealias) dealias_23(hat, g.size());
  return hat;
}

}  // namespace

Field rhs(const Field& u, double delta, bool dealias) {
  const Grid& g = u.grid();
  const Multiplier km = Multiplier::tilbert_dx(g, delta);
  const Multiplier dm = Multiplier::derivative(g, 1);
  const auto k = km.half_symbol();
  const auto d = dm.half_symbol();
  std::vector<std::complex<double>> uh(g.half_size());
  g.forward(u.values(), uh);
  const auto sq = square_hat(u, dealias);
  // d/dx of -(u^2 + Ku + u/delta)
  std::vector<std::complex<double>> out(uh.size());
  for (std::size_t i = 0; i < uh.size(); ++i) out[i] = -d[i] * (sq[i] + k[i] * uh[i] + uh[i] / delta);
  Field r(g);
  g.inverse(out, r.values());
  return r;
}

Field rhs_direct(const Field& u, double delta, bool dealias) {
  const Grid& g = u.grid();
  const Field ux = derivative(u, 1);
  const Field tuxx = apply_multiplier(u, Multiplier::tilbert_dxx(g, delta));
  Field prod(g);
  for (int j = 0; j < u.size(); ++j) prod[j] = 2.0 * u[j] * ux[j];
  if (dealias) {
    std::vector<std::complex<double>> hat(g.half_size());
    g.forward(prod.values(), hat);
    dealias_23(hat, g.size());
    g.inverse(hat, prod.values());
  }
  Field r(g);
  for (int j = 0; j < u.size(); ++j) r[j] = -ux[j] / delta - prod[j] - tuxx[j];
  return r;
}

// ---------------------------------------------------------------- Stepper

Stepper::Stepper(Grid grid, double delta, double dt, bool nonlinear, bool dealias)
    : grid_(std::move(grid)), delta_(delta), dt_(dt), nonlinear_(nonlinear), dealias_(dealias) {
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be positive");
  const int n = grid_.size();
  const int nh = grid_.half_size();
  half_step_.resize(nh);
  full_step_.resize(nh);
  ik_.resize(nh);
  for (int k = 0; k < nh; ++k) {
    const double xi = grid_.frequency(k);
    const double q = (k == n / 2) ? 0.0 : kTwoPi * xi;
    ik_[k] = {0.0, q};
    const double omega = q * dispersion_w_centered(xi, delta);
    half_step_[k] = std::polar(1.0, 0.5 * omega * dt);
    full_step_[k] = std::polar(1.0, omega * dt);
  }
  hat_.assign(nh, 0.0);
  a_ = b_ = c_ = d_ = tmp_ = hat_;
  phys_.assign(n, 0.0);
}

void Stepper::set_state(const Field& u) {
  require_same_grid(grid_, u.grid(), "Stepper::set_state");
  grid_.forward(u.values(), hat_);
}

Field Stepper::state() const {
  Field u(grid_);
  grid_.inverse(hat_, u.values());
  return u;
}

void Stepper::nonlinear_term(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) {
  grid_.inverse(in, phys_);
  for (double& v : phys_) v *= v;
  grid_.forward(phys_, out);
  if (dealias_) dealias_23(out, grid_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= -dt_ * ik_[k];
}

void Stepper::step() {
  const std::size_t nh = hat_.size();
  if (!nonlinear_) {
    for (std::size_t k = 0; k < nh; ++k) hat_[k] *= full_step_[k];
    return;
  }
  const auto& E = half_step_;
  const auto& E2 = full_step_;
  nonlinear_term(hat_, a_);
  for (std::size_t k = 0; k < nh; ++k) tmp_[k] = E[k] * (hat_[k] + 0.5 * a_[k]);
  nonlinear_term(tmp_, b_);
  for (std::size_t k = 0; k < nh; ++k) tmp_[k] = E[k] * hat_[k] + 0.5 * b_[k];
  nonlinear_term(tmp_, c_);
  for (std::size_t k = 0; k < nh; ++k) tmp_[k] = E2[k] * hat_[k] + E[k] * c_[k];
  nonlinear_term(tmp_, d_);
  for (std::size_t k = 0; k < nh; ++k)
    hat_[k] = E2[k] * hat_[k] + (E2[k] * a_[k] + 2.0 * E[k] * (b_[k] + c_[k]) + d_[k]) / 6.0;
}

void Stepper::check_finite() const {
  for (const auto& v : hat_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("evolution blew up: non-finite state");
}

Field step_ifrk4(const Field& u, double dt, double delta, bool nonlinear, bool dealias) {
  Stepper s(u.grid(), delta, dt, nonlinear, dealias);
  s.set_state(u);
  s.step();
  s.check_finite();
  return s.state();
}

// ---------------------------------------------------------------- run

TraceRecord make_record(const Field& u, double t, double delta, const EvolveConfig& cfg, H3Form form) {
  TraceRecord r;
  r.t = t;
  for (int m = 0; m < 4; ++m) r.H[m] = eval_H(m, u, delta, form);
  r.peaks = track_peaks(u, cfg.peak_threshold);
  r.sobolev_half = sobolev_norm(u, 0.5);
  if (cfg.tail_watch) {
    const double edge = 0.4 * u.grid().length();
    for (int j = 0; j < u.size(); ++j)
      if (std::abs(u.grid().x(j)) >= edge) r.tail = std::max(r.tail, std::abs(u[j]));
  }
  return r;
}

RunResult run(const Field& u0, const EvolveConfig& cfg, double delta, Diagnostics* diag, H3Form form,
              const StateObserver& observer) {
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw InputError("dt and T must be positive");
  if (cfg.dt > cfg.T) throw InputError("dt must not exceed T");
  if (cfg.record_stride < 1) throw InputError("record_stride must be positive");
  if (!u0.all_finite()) throw InputError("initial state has non-finite entries");

  const Grid& g = u0.grid();
  RunResult out{u0, {}, 0.0, 0};
  out.cfl = cfg.dt * u0.max_abs() * kTwoPi * (g.size() / 2) / g.length();
  if (diag && out.cfl > 0.5) {
    std::ostringstream os;
    os << "nonlinear CFL estimate " << out.cfl << " exceeds 0.5";
    diag->warn(os.str());
  }

  const int steps = static_cast<int>(std::llround(cfg.T / cfg.dt));
  Stepper stepper(g, delta, cfg.dt, cfg.nonlinear, cfg.dealias);
  stepper.set_state(u0);
  out.trace.push_back(make_record(u0, 0.0, delta, cfg, form));
  if (observer) observer(0.0, u0);
  for (int n = 1; n <= steps; ++n) {
    stepper.step();
    if (n % cfg.record_stride == 0 || n == steps) {
      stepper.check_finite();
      const Field u = stepper.state();
      out.trace.push_back(make_record(u, n * cfg.dt, delta, cfg, form));
      if (observer) observer(n * cfg.dt, u);
    }
  }
  stepper.check_finite();
  out.final_state = stepper.state();
  out.steps = steps;
  return out;
}

// ---------------------------------------------------------------- limits

std::vector<LimitError> limit_symbol_errors(double delta, const std::vector<double>& xi) {
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  std::vector<LimitError> out;
  out.reserve(xi.size());
  for (double x : xi) {
    LimitError e;
    e.xi = x;
    const double q = kTwoPi * std::abs(x);
    const double wc = dispersion_w_centered(x, delta);
    const double kdv = delta * q * q / 3.0;
    e.kdv_err = wc == 0.0 ? std::abs(kdv) : std::abs(wc - kdv) / std::abs(wc);
    const double w = dispersion_w(x, delta);
    e.bo_err = std::abs(w - q) / w;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------- peaks

namespace {

struct Interpolant {
  double length;
  int n;
  std::vector<std::complex<double>> c;  // FFT order

  // value, first and second derivative at x
  std::array<double, 3> eval(double x) const {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const int k = i < n / 2 ? i : i - n;
      const double q = kTwoPi * k / length;
      if (k == -n / 2) {
        // real cosine mode
        const double cr = c[i].real();
        r[0] += cr * std::cos(q * x);
        r[1] += -cr * q * std::sin(q * x);
        r[2] += -cr * q * q * std::cos(q * x);
        continue;
      }
      const std::complex<double> e = c[i] * std::polar(1.0, q * x);
      r[0] += e.real();
      r[1] += -q * e.imag();
      r[2] += -q * q * e.real();
    }
    return r;
  }
};

}  // namespace

std::vector<Peak> track_peaks(const Field& u, double min_height) {
  if (!(min_height > 0.0)) throw InputError("min_height must be positive");
  const Grid& g = u.grid();
  const int n = u.size();
  const double h = g.spacing();
  std::vector<Peak> peaks;
  Interpolant interp{g.length(), n, {}};
  for (int j = 0; j < n; ++j) {
    const double um = u[(j - 1 + n) % n];
    const double u0 = u[j];
    const double up = u[(j + 1) % n];
    if (!(u0 >= min_height && u0 > um && u0 >= up)) continue;
    const double denom = um - 2.0 * u0 + up;
    double offset = denom < 0.0 ? 0.5 * h * (um - up) / denom : 0.0;
    double x = g.x(j) + offset;
    double height = u0 - 0.125 * (um - up) * (um - up) / (denom < 0.0 ? denom : -1.0);
    if (interp.c.empty()) interp.c = fourier_coefficients(u);
    for (int it = 0; it < 8; ++it) {
      const auto v = interp.eval(x);
      if (!(v[2] < 0.0)) break;
      const double dx = -v[1] / v[2];
      if (std::abs(dx) > h) break;
      x += dx;
      height = v[0];
      if (std::abs(dx) < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    height = interp.eval(x)[0];
    peaks.push_back({wrap_periodic(x, g.length()), height});
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return peaks;
}

SpeedFit fit_speed(const std::vector<std::pair<double, double>>& series, double period) {
  if (series.size() < 2) throw InputError("speed fit needs at least two samples");
  std::vector<double> x(series.size());
  x[0] = series[0].second;
  for (std::size_t i = 1; i < series.size(); ++i) {
    double step = series[i].second - series[i - 1].second;
    if (period > 0.0) step -= period * std::round(step / period);
    x[i] = x[i - 1] + step;
  }
  const double n = static_cast<double>(series.size());
  double st = 0, sx = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    st += series[i].first;
    sx += x[i];
  }
  const double tm = st / n, xm = sx / n;
  double stt = 0, stx = 0, sxx = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double dt = series[i].first - tm, dx = x[i] - xm;
    stt += dt * dt;
    stx += dt * dx;
    sxx += dx * dx;
  }
  if (!(stt > 0.0)) throw InputError("speed fit needs distinct times");
  SpeedFit f;
  f.speed = stx / stt;
  f.intercept = xm - f.speed * tm;
  f.r2 = sxx > 0.0 ? stx * stx / (stt * sxx) : 1.0;
  return f;
}

}  // namespace ilw
