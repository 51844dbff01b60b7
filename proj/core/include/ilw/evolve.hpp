#pragma once

// Time integration of u_t + u_x/delta + 2 u u_x + T^delta u_xx = 0 with an
// integrating-factor RK4 scheme, plus conservation traces and peak tracking.

#include <array>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "ilw/errors.hpp"
#include "ilw/functionals.hpp"
#include "ilw/spectral.hpp"

namespace ilw {

struct EvolveConfig {
  double dt = 1e-3;
  double T = 1.0;
  bool dealias = true;
  int record_stride = 100;
  bool tail_watch = false;
  bool nonlinear = true;
  /// Peaks below this height are not reported in traces.
  double peak_threshold = 0.05;
};

struct Peak {
  double position = 0.0;
  double height = 0.0;
};

struct TraceRecord {
  double t = 0.0;
  std::array<double, 4> H{};
  std::vector<Peak> peaks;
  double sobolev_half = 0.0;
  /// max |u| over the outer fifth of the box; only filled with tail_watch.
  double tail = 0.0;
};

/// d/dx grad H2(u): the right-hand side in Hamiltonian form.
Field rhs(const Field& u, double delta, bool dealias = true);
/// -(1/delta) u_x - 2 u u_x - T^delta u_xx term by term.
Field rhs_direct(const Field& u, double delta, bool dealias = true);

/// Zeroes modes with 3|k| >= N in a half spectrum.
void dealias_23(std::span<std::complex<double>> half_spectrum, int n);

/// Integrating-factor RK4 on a fixed grid and step. The state is kept in
/// Fourier space between steps, so the mean is preserved exactly.
class Stepper {
 public:
  Stepper(Grid grid, double delta, double dt, bool nonlinear = true, bool dealias = true);

  void set_state(const Field& u);
  Field state() const;
  void step();
  /// Throws NumericalError if the state has become non-finite.
  void check_finite() const;

  double dt() const noexcept { return dt_; }

 private:
  void nonlinear_term(const std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out);

  Grid grid_;
  double delta_;
  double dt_;
  bool nonlinear_;
  bool dealias_;
  std::vector<std::complex<double>> half_step_;  // exp(m dt / 2)
  std::vector<std::complex<double>> full_step_;  // exp(m dt)
  std::vector<std::complex<double>> ik_;         // 2 pi i xi, zero at Nyquist
  std::vector<std::complex<double>> hat_;
  std::vector<std::complex<double>> a_, b_, c_, d_, tmp_;
  std::vector<double> phys_;
};

Field step_ifrk4(const Field& u, double dt, double delta, bool nonlinear = true, bool dealias = true);

struct RunResult {
  Field final_state;
  std::vector<TraceRecord> trace;
  /// dt max|u0| max|2 pi xi|
  double cfl = 0.0;
  int steps = 0;
};

using StateObserver = std::function<void(double t, const Field& u)>;

/// Steps round(T/dt) times; records at t = 0, every record_stride steps and at the end.
/// `observer` sees the state at each record.
RunResult run(const Field& u0, const EvolveConfig& cfg, double delta, Diagnostics* diag = nullptr,
              H3Form form = H3Form::conserved, const StateObserver& observer = {});

TraceRecord make_record(const Field& u, double t, double delta, const EvolveConfig& cfg,
                        H3Form form = H3Form::conserved);

struct LimitError {
  double xi = 0.0;
  /// |(w - 1/delta) - delta (2 pi xi)^2 / 3| / |w - 1/delta|, 0 at xi = 0
  double kdv_err = 0.0;
  /// |w - 2 pi |xi|| / w
  double bo_err = 0.0;
};

std::vector<LimitError> limit_symbol_errors(double delta, const std::vector<double>& xi);

/// Local maxima of height >= min_height, refined by a three-point parabola
/// and then by Newton steps on the trigonometric interpolant.
std::vector<Peak> track_peaks(const Field& u, double min_height);

struct SpeedFit {
  double speed = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of (t, x) after unwrapping jumps larger than period/2.
SpeedFit fit_speed(const std::vector<std::pair<double, double>>& series, double period);

}  // namespace ilw
