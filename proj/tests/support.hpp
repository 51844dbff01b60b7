#pragma once

// Helpers shared by the unit tests and the acceptance driver.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ilw/spectral.hpp"

namespace ilw::testing {

/// Band-limited random field sum_{1<=k<=kmax} (a_k cos + b_k sin)(2 pi k x / L),
/// scaled so max |u| = amplitude, plus an optional mean.
inline Field random_smooth(const Grid& g, std::uint64_t seed, int kmax = 6, double amplitude = 1.0,
                           double mean = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> a(kmax + 1), b(kmax + 1);
  for (int k = 1; k <= kmax; ++k) {
    a[k] = nd(rng) / k;
    b[k] = nd(rng) / k;
  }
  Field f = Field::sample(g, [&](double x) {
    double v = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      const double th = 2.0 * std::numbers::pi * k * x / g.length();
      v += a[k] * std::cos(th) + b[k] * std::sin(th);
    }
    return v;
  });
  f *= amplitude / f.max_abs();
  for (int j = 0; j < f.size(); ++j) f[j] += mean;
  return f;
}

/// Root of tan(a) = -a on (pi/2, pi) by long-double bisection.
inline long double tan_root_oracle() {
  long double lo = std::numbers::pi_v<long double> / 2 + 1e-12L;
  long double hi = std::numbers::pi_v<long double> - 1e-12L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    const long double f = std::tan(mid) + mid;  // negative just past pi/2, zero at the root
    if (f < 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

/// y coth y - 1 from the continued fraction y^2 / (3 + y^2 / (5 + y^2 / (7 + ...))).
inline long double ycoth_minus_one_oracle(long double y) {
  const long double y2 = y * y;
  long double tail = 0.0L;
  for (int k = 200; k >= 1; --k) tail = y2 / (2 * k + 1 + tail);
  return tail;
}

/// 1 - t cot t; the same fraction with y^2 replaced by -t^2.
inline long double one_minus_tcot_oracle(long double t) {
  const long double t2 = -t * t;
  long double tail = 0.0L;
  for (int k = 200; k >= 1; --k) tail = t2 / (2 * k + 1 + tail);
  return -tail;
}

/// Long-double bisection for 1 - theta cot theta = c delta, theta in (0, pi).
inline long double theta_oracle(long double c, long double delta) {
  long double lo = 0.0L, hi = std::numbers::pi_v<long double>;
  const long double target = c * delta;
  for (int i = 0; i < 300; ++i) {
    const long double mid = 0.5L * (lo + hi);
    const long double g = mid < 1.0L ? one_minus_tcot_oracle(mid) : 1.0L - mid * std::cos(mid) / std::sin(mid);
    if (g < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

/// 2 pi xi coth(2 pi delta xi) in long double.
inline long double w_oracle(long double xi, long double delta) {
  if (xi == 0) return 1.0L / delta;
  const long double y = 2.0L * std::numbers::pi_v<long double> * delta * std::fabs(xi);
  if (y < 1.0L) return (1.0L + ycoth_minus_one_oracle(y)) / delta;
  const long double e = std::exp(-2.0L * y);
  return 2.0L * std::numbers::pi_v<long double> * std::fabs(xi) * (1.0L + e) / (1.0L - e);
}

}  // namespace ilw::testing
