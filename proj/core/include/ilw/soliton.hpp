#pragma once

// Single ILW solitary waves
//   Q(s) = a sin(a delta) / (cosh(a s) + cos(a delta)),
//   a delta cot(a delta) = 1 - c delta,  0 < a < pi / delta,
// and superpositions of well-separated ones.

#include <vector>

#include "ilw/errors.hpp"
#include "ilw/spectral.hpp"

namespace ilw {

struct SolitonParams {
  double c = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double kappa = 0.0;  // a / 2
  double x0 = 0.0;

  double theta() const noexcept { return a * delta; }
  double peak() const noexcept;
};

/// Bisection for the profile parameter a. Converges to the closest double, so
/// the answer is always well inside `tol` (which must lie in (0, 1e-10]).
SolitonParams solve_transcendental(double c, double delta, double tol = 1e-12);

/// Convenience: solve and set the initial position.
SolitonParams make_soliton(double c, double delta, double x0 = 0.0);

/// Profile value at offset s from the crest, evaluated without overflow.
double soliton_profile(const SolitonParams& p, double s) noexcept;

/// Q sampled at x - c t - x0, wrapped to the nearest periodic image.
/// Warns when exp(-a L / 2) >= 1e-13.
Field sample_soliton(const SolitonParams& p, const Grid& g, double t = 0.0, Diagnostics* diag = nullptr);

/// dQ/dc by a central difference with relative step 1e-5 (re-solving a at c +- h).
Field soliton_dc(const SolitonParams& p, const Grid& g);

struct SolitonEntry {
  double c = 0.0;
  double x0 = 0.0;
};

struct MultiSolitonSpec {
  std::vector<SolitonEntry> entries;

  /// Throws InputError unless 0 < c_1 < c_2 < ... < c_n.
  void validate() const;
  std::vector<double> speeds() const;
};

struct Superposition {
  Field field;
  std::vector<SolitonParams> params;
  /// Smallest periodic distance between crests.
  double min_separation = 0.0;
  /// min_separation * min_j a_j, i.e. separation in units of the widest tail scale.
  double scaled_separation = 0.0;
};

Superposition superpose(const MultiSolitonSpec& spec, double delta, const Grid& g, double t = 0.0,
                        Diagnostics* diag = nullptr);

/// Minimal periodic image of s in [-L/2, L/2).
double wrap_periodic(double s, double length) noexcept;

}  // namespace ilw
