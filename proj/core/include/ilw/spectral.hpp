#pragma once

// Periodic grids, FFT-based Fourier multipliers and the discrete L2 / H^s
// pairings. Everything downstream is built on these pieces.
//
// Conventions
//   x_j  = -L/2 + j h,  h = L/N,  j = 0..N-1
//   k    in {-N/2, ..., N/2-1},  xi_k = k / L
//   c_k  = (1/N) sum_j f_j exp(-2 pi i k x_j / L)
//   <f, g> = h sum_j f_j g_j = L sum_k c_k(f) conj(c_k(g))
// Symbols are stored in FFT order: index 0..N/2-1 holds k = 0..N/2-1 and
// index N/2..N-1 holds k = -N/2..-1.

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ilw/errors.hpp"

namespace ilw {

namespace detail {
struct FftPlans;

/// y coth(y) - 1 without cancellation near y = 0.
double ycoth_minus_one(double y) noexcept;
/// 1 - t cot(t) for t in [0, pi), without cancellation near t = 0.
double one_minus_tcot(double t) noexcept;
}  // namespace detail

class Grid {
 public:
  /// Validates N even, N >= 16, L > 0.
  static Grid make(int num_points, double length);

  int size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  double x(int j) const noexcept { return -0.5 * length_ + j * spacing(); }
  std::vector<double> points() const;

  /// Signed wavenumber of FFT-order index `index`.
  int wavenumber(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }
  /// FFT-order index of signed wavenumber k in [-N/2, N/2).
  int index_of(int k) const noexcept { return k >= 0 ? k : k + n_; }
  double frequency(int k) const noexcept { return k / length_; }

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

  /// Unnormalized real-to-half-complex DFT in index order: F_m = sum_j f_j e^{-2 pi i j m / N},
  /// m = 0..N/2.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse of `forward`, including the 1/N factor. `in` is left untouched.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  int half_size() const noexcept { return n_ / 2 + 1; }

 private:
  Grid(int n, double length);

  int n_ = 0;
  double length_ = 0.0;
  std::shared_ptr<const detail::FftPlans> plans_;
};

/// Real samples of a function on a Grid.
class Field {
 public:
  explicit Field(Grid grid);
  /// Throws InputError on length mismatch or non-finite entries.
  Field(Grid grid, std::vector<double> values);

  template <typename F>
  static Field sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (int j = 0; j < grid.size(); ++j) v[j] = f(grid.x(j));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](int j) const noexcept { return values_[j]; }
  double& operator[](int j) noexcept { return values_[j]; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;
  /// this += s * other
  Field& axpy(double s, const Field& other);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator-(Field a);
/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

/// Diagonal operator in Fourier space.
class Multiplier {
 public:
  /// `symbol` has length N in FFT order. Throws InputError unless
  /// symbol(-k) == conj(symbol(k)) and the k = 0 and Nyquist entries are real.
  Multiplier(Grid grid, std::vector<std::complex<double>> symbol);

  /// Builds a Hermitian multiplier from a function of the continuous frequency xi.
  /// Negative wavenumbers are filled by conjugation; the Nyquist entry is the
  /// even part (f(xi) + f(-xi))/2, real.
  static Multiplier from_function(const Grid& grid,
                                  const std::function<std::complex<double>(double)>& f);

  /// (2 pi i xi)^order
  static Multiplier derivative(const Grid& grid, int order);
  /// d/dx T^delta, symbol -w(xi; delta).
  static Multiplier tilbert_dx(const Grid& grid, double delta);
  /// T^delta alone, symbol i coth(2 pi delta xi), zero on the k = 0 mode.
  static Multiplier tilbert(const Grid& grid, double delta);
  /// T^delta d^2/dx^2, symbol -w(xi; delta) (2 pi i xi).
  static Multiplier tilbert_dxx(const Grid& grid, double delta);
  /// (1 + (2 pi xi)^2)^(s/2)
  static Multiplier sobolev_weight(const Grid& grid, double s);

  const Grid& grid() const noexcept { return grid_; }
  /// Symbol at signed wavenumber k.
  std::complex<double> operator()(int k) const noexcept { return symbol_[grid_.index_of(k)]; }
  std::span<const std::complex<double>> symbol() const noexcept { return symbol_; }
  /// Entries for FFT half-spectrum indices 0..N/2 (the last one is the Nyquist mode).
  std::span<const std::complex<double>> half_symbol() const& noexcept { return half_; }
  std::span<const std::complex<double>> half_symbol() const&& = delete;

  /// Composition (product of symbols).
  Multiplier operator*(const Multiplier& other) const;

 private:
  Grid grid_;
  std::vector<std::complex<double>> symbol_;
  std::vector<std::complex<double>> half_;
};

/// w(xi; delta) = 2 pi xi coth(2 pi delta xi), with w(0) = 1/delta. Throws on delta <= 0.
double dispersion_w(double xi, double delta);
/// w(xi; delta) - 1/delta without cancellation near xi = 0.
double dispersion_w_centered(double xi, double delta);
/// coth(2 pi delta xi) for xi != 0, overflow-free.
double tilbert_coth(double xi, double delta);

Field apply_multiplier(const Field& f, const Multiplier& m);

/// h sum f_j g_j. Throws InputError on grid mismatch.
double inner_product(const Field& f, const Field& g);
double l2_norm(const Field& f);
/// sqrt(L sum_k (1 + (2 pi xi_k)^2)^s |c_k|^2)
double sobolev_norm(const Field& f, double s);

/// Normalized coefficients c_k in FFT order (length N), including the phase
/// from the x_0 = -L/2 origin.
std::vector<std::complex<double>> fourier_coefficients(const Field& f);

/// Convenience wrappers for the operators used throughout.
Field derivative(const Field& f, int order = 1);
Field tilbert_dx(const Field& f, double delta);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace ilw
