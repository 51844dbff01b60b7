#include "ilw/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace ilw {

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlans {
  int n = 0;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit FftPlans(int num) : n(num) {
    std::lock_guard lock(planner_mutex());
    double* re = fftw_alloc_real(n);
    fftw_complex* co = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c_1d(n, re, co, flags);
    c2r = fftw_plan_dft_c2r_1d(n, co, re, flags);
    fftw_free(re);
    fftw_free(co);
    if (!r2c || !c2r) throw NumericalError("FFTW plan creation failed");
  }
  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

namespace {
// Plans are shared between grids of the same size.
std::shared_ptr<const FftPlans> plans_for(int n) {
  static std::mutex m;
  static std::vector<std::weak_ptr<const FftPlans>> cache(0);
  static std::vector<int> sizes;
  std::lock_guard lock(m);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == n) {
      if (auto p = cache[i].lock()) return p;
      auto fresh = std::make_shared<const FftPlans>(n);
      cache[i] = fresh;
      return fresh;
    }
  }
  auto fresh = std::make_shared<const FftPlans>(n);
  sizes.push_back(n);
  cache.push_back(fresh);
  return fresh;
}
}  // namespace

}  // namespace detail

Grid::Grid(int n, double length) : n_(n), length_(length), plans_(detail::plans_for(n)) {}

Grid Grid::make(int num_points, double length) {
  if (num_points % 2 != 0) throw InputError("N must be even");
  if (num_points < 16) throw InputError("N must be at least 16");
  if (!(length > 0.0) || !std::isfinite(length)) throw InputError("L must be positive and finite");
  return Grid(num_points, length);
}

std::vector<double> Grid::points() const {
  std::vector<double> p(n_);
  for (int j = 0; j < n_; ++j) p[j] = x(j);
  return p;
}

void Grid::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != half_size())
    throw InputError("forward transform: size mismatch");
  // r2c does not modify its input with FFTW_ESTIMATE plans
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Grid::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != half_size() || static_cast<int>(out.size()) != n_)
    throw InputError("inverse transform: size mismatch");
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double inv = 1.0 / n_;
  for (double& v : out) v *= inv;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    std::ostringstream os;
    os << what << ": grid mismatch (N=" << a.size() << ", L=" << a.length() << " vs N=" << b.size()
       << ", L=" << b.length() << ")";
    throw InputError(os.str());
  }
}

// ---------------------------------------------------------------- Field

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) throw InputError("field length does not match grid");
  if (!all_finite()) throw InputError("field has non-finite entries");
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field& Field::operator+=(const Field& other) { return axpy(1.0, other); }
Field& Field::operator-=(const Field& other) { return axpy(-1.0, other); }

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& other) {
  require_same_grid(grid_, other.grid_, "field arithmetic");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += s * other.values_[j];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }
Field operator-(Field a) { return a *= -1.0; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  Field out(a.grid());
  for (int j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
  return out;
}

// ---------------------------------------------------------------- symbols

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("delta must be positive");
}
}  // namespace

double tilbert_coth(double xi, double delta) {
  require_delta(delta);
  const double y = kTwoPi * delta * std::abs(xi);
  const double sgn = xi < 0 ? -1.0 : 1.0;
  if (delta * std::abs(xi) > 1.0) {
    const double e = std::exp(-2.0 * y);
    return sgn * (1.0 + 2.0 * e / (1.0 - e));
  }
  return sgn / std::tanh(y);
}

double dispersion_w(double xi, double delta) {
  require_delta(delta);
  const double y = kTwoPi * delta * std::abs(xi);
  if (y < 1e-4) return (1.0 + y * y / 3.0) / delta;
  return kTwoPi * std::abs(xi) * std::abs(tilbert_coth(xi, delta));
}

double dispersion_w_centered(double xi, double delta) {
  require_delta(delta);
  return detail::ycoth_minus_one(kTwoPi * delta * std::abs(xi)) / delta;
}

namespace detail {

namespace {
// y coth y = 1 + sum_n kCothSeries[n-1] y^{2n}; terms shrink like (y / pi)^{2n}.
constexpr double kCothSeries[] = {
    0.33333333333333331,     -0.022222222222222223,   0.0021164021164021165,   -0.00021164021164021165,
    2.1377799155576935e-05,  -2.1644042808063972e-06, 2.1925947851873778e-07,  -2.2214608789979678e-08,
    2.2507846516808994e-09,  -2.2805151204592183e-10, 2.3106432599002624e-11,  -2.3411706819824882e-12,
    2.3721017400233653e-13,  -2.4034415333307705e-14,
};

// Horner sum of b_n x^{2n}, or of |b_n| x^{2n} when `absolute`.
double coth_series(double x2, bool absolute) noexcept {
  double acc = 0.0;
  constexpr int n = sizeof(kCothSeries) / sizeof(double);
  for (int i = n - 1; i >= 0; --i) acc = x2 * ((absolute ? std::abs(kCothSeries[i]) : kCothSeries[i]) + acc);
  return acc;
}
}  // namespace

double ycoth_minus_one(double y) noexcept {
  y = std::abs(y);
  if (y < 0.5) return coth_series(y * y, false);
  return y / std::tanh(y) - 1.0;
}

double one_minus_tcot(double t) noexcept {
  // t cot t = 1 + sum_n (-1)^n b_n t^{2n} and (-1)^n b_n = -|b_n|
  if (t < 0.5) return coth_series(t * t, true);
  return 1.0 - t * std::cos(t) / std::sin(t);
}

}  // namespace detail

// ---------------------------------------------------------------- Multiplier

Multiplier::Multiplier(Grid grid, std::vector<std::complex<double>> symbol)
    : grid_(std::move(grid)), symbol_(std::move(symbol)) {
  const int n = grid_.size();
  if (static_cast<int>(symbol_.size()) != n) throw InputError("multiplier length does not match grid");
  double scale = 1.0;
  for (const auto& s : symbol_) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw InputError("multiplier has non-finite entries");
    scale = std::max(scale, std::abs(s));
  }
  const double tol = 1e-12 * scale;
  if (std::abs(symbol_[0].imag()) > tol) throw InputError("multiplier: k = 0 entry must be real");
  if (std::abs(symbol_[n / 2].imag()) > tol) throw InputError("multiplier: Nyquist entry must be real");
  for (int k = 1; k < n / 2; ++k) {
    if (std::abs(symbol_[n - k] - std::conj(symbol_[k])) > tol)
      throw InputError("multiplier symbol is not Hermitian");
  }
  symbol_[0] = symbol_[0].real();
  symbol_[n / 2] = symbol_[n / 2].real();
  half_.assign(symbol_.begin(), symbol_.begin() + n / 2 + 1);
}

Multiplier Multiplier::from_function(const Grid& grid, const std::function<std::complex<double>(double)>& f) {
  const int n = grid.size();
  std::vector<std::complex<double>> s(n);
  s[0] = f(0.0).real();
  for (int k = 1; k < n / 2; ++k) {
    s[k] = f(grid.frequency(k));
    s[n - k] = std::conj(s[k]);
  }
  const double xn = grid.frequency(n / 2);
  s[n / 2] = 0.5 * (f(xn) + f(-xn)).real();
  return Multiplier(grid, std::move(s));
}

Multiplier Multiplier::derivative(const Grid& grid, int order) {
  if (order < 0) throw InputError("derivative order must be nonnegative");
  return from_function(grid, [order](double xi) { return std::pow(std::complex<double>(0.0, kTwoPi * xi), order); });
}

Multiplier Multiplier::tilbert_dx(const Grid& grid, double delta) {
  require_delta(delta);
  return from_function(grid, [delta](double xi) { return std::complex<double>(-dispersion_w(xi, delta), 0.0); });
}

Multiplier Multiplier::tilbert(const Grid& grid, double delta) {
  require_delta(delta);
  return from_function(grid, [delta](double xi) {
    if (xi == 0.0) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(0.0, tilbert_coth(xi, delta));
  });
}

Multiplier Multiplier::tilbert_dxx(const Grid& grid, double delta) {
  require_delta(delta);
  return from_function(grid, [delta](double xi) {
    return -dispersion_w(xi, delta) * std::complex<double>(0.0, kTwoPi * xi);
  });
}

Multiplier Multiplier::sobolev_weight(const Grid& grid, double s) {
  return from_function(grid, [s](double xi) {
    const double q = kTwoPi * xi;
    return std::complex<double>(std::pow(1.0 + q * q, 0.5 * s), 0.0);
  });
}

Multiplier Multiplier::operator*(const Multiplier& other) const {
  require_same_grid(grid_, other.grid_, "multiplier composition");
  std::vector<std::complex<double>> s(symbol_.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = symbol_[i] * other.symbol_[i];
  return Multiplier(grid_, std::move(s));
}

// ---------------------------------------------------------------- actions

Field apply_multiplier(const Field& f, const Multiplier& m) {
  require_same_grid(f.grid(), m.grid(), "apply_multiplier");
  const Grid& g = f.grid();
  std::vector<std::complex<double>> spec(g.half_size());
  g.forward(f.values(), spec);
  const auto sym = m.half_symbol();
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= sym[k];
  Field out(g);
  g.inverse(spec, out.values());
  return out;
}

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return f.grid().spacing() * s;
}

double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

std::vector<std::complex<double>> fourier_coefficients(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.size();
  std::vector<std::complex<double>> half(g.half_size());
  g.forward(f.values(), half);
  std::vector<std::complex<double>> c(n);
  // x_0 = -L/2 contributes e^{i pi k} = (-1)^k
  for (int m = 0; m <= n / 2; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const std::complex<double> v = sign * half[m] / static_cast<double>(n);
    if (m < n / 2) {
      c[m] = v;
      if (m > 0) c[n - m] = std::conj(v);
    } else {
      c[m] = v;  // k = -N/2
    }
  }
  return c;
}

double sobolev_norm(const Field& f, double s) {
  const Grid& g = f.grid();
  const auto c = fourier_coefficients(f);
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double q = kTwoPi * g.frequency(g.wavenumber(i));
    acc += std::pow(1.0 + q * q, s) * std::norm(c[i]);
  }
  return std::sqrt(g.length() * acc);
}

Field derivative(const Field& f, int order) { return apply_multiplier(f, Multiplier::derivative(f.grid(), order)); }

Field tilbert_dx(const Field& f, double delta) { return apply_multiplier(f, Multiplier::tilbert_dx(f.grid(), delta)); }

}  // namespace ilw
