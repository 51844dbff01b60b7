#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "ilw/spectral.hpp"
#include "support.hpp"

using namespace ilw;
using ilw::testing::random_smooth;
using ilw::testing::w_oracle;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid::make(63, 10.0), InputError);
  EXPECT_THROW(Grid::make(8, 10.0), InputError);
  EXPECT_THROW(Grid::make(64, 0.0), InputError);
  EXPECT_THROW(Grid::make(64, -1.0), InputError);
  EXPECT_NO_THROW(Grid::make(16, 1.0));
}

TEST(Grid, PointsAndWavenumbers) {
  const Grid g = Grid::make(32, 8.0);
  EXPECT_DOUBLE_EQ(g.x(0), -4.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_EQ(g.wavenumber(15), 15);
  EXPECT_EQ(g.wavenumber(16), -16);
  EXPECT_EQ(g.index_of(-1), 31);
  EXPECT_DOUBLE_EQ(g.frequency(2), 0.25);
}

TEST(Field, RejectsNonFiniteAndMismatch) {
  const Grid g = Grid::make(16, 1.0);
  std::vector<double> v(16, 0.0);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Field(g, v), InputError);
  EXPECT_THROW(Field(g, std::vector<double>(15, 0.0)), InputError);
  const Field a(g), b(Grid::make(32, 1.0));
  EXPECT_THROW(inner_product(a, b), InputError);
}

TEST(Dispersion, KnownValueAndOracle) {
  EXPECT_NEAR(dispersion_w(1.0, 1.0), 6.2832291, 5e-8);
  for (double delta : {0.1, 1.0, 7.0})
    for (double xi : {-3.0, -0.01, 1e-6, 0.2, 2.5, 40.0}) {
      const double want = static_cast<double>(w_oracle(xi, delta));
      EXPECT_NEAR(dispersion_w(xi, delta), want, 1e-14 * want) << xi << " " << delta;
    }
  EXPECT_DOUBLE_EQ(dispersion_w(0.0, 2.0), 0.5);
}

TEST(Dispersion, CenteredFormAvoidsCancellation) {
  for (double delta : {0.5, 2.0})
    for (double xi : {1e-8, 1e-5, 1e-3, 0.03, 0.05, 0.2, 1.0}) {
      const long double y = 2.0L * std::numbers::pi_v<long double> * delta * xi;
      const double exact = static_cast<double>(ilw::testing::ycoth_minus_one_oracle(y) / delta);
      EXPECT_NEAR(dispersion_w_centered(xi, delta), exact, 1e-14 * exact) << xi << " " << delta;
    }
}

TEST(Dispersion, TilbertCothStaysFinite) {
  EXPECT_DOUBLE_EQ(tilbert_coth(1e6, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(tilbert_coth(-1e6, 1.0), -1.0);
  EXPECT_TRUE(std::isfinite(tilbert_coth(1e-300, 1.0)));
}

TEST(Multiplier, RejectsNonHermitianSymbol) {
  const Grid g = Grid::make(16, 1.0);
  std::vector<std::complex<double>> s(16, 1.0);
  s[1] = {0.0, 1.0};
  EXPECT_THROW(Multiplier(g, s), InputError);
  s[1] = 1.0;
  s[8] = {0.0, 1.0};
  EXPECT_THROW(Multiplier(g, s), InputError);
}

TEST(Multiplier, SingleModeDerivativeAndK) {
  const Grid g = Grid::make(64, 10.0);
  const int m = 5;
  const double q = 2.0 * kPi * m / g.length();
  const Field c = Field::sample(g, [&](double x) { return std::cos(q * x); });
  const Field dc = derivative(c, 1);
  const Field kc = tilbert_dx(c, 0.7);
  const double w = dispersion_w(m / g.length(), 0.7);
  for (int j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(dc[j], -q * std::sin(q * g.x(j)), 1e-12);
    EXPECT_NEAR(kc[j], -w * c[j], 1e-12);
  }
}

TEST(Multiplier, NyquistModeHasNoOddDerivative) {
  const Grid g = Grid::make(32, 3.0);
  Field f(g);
  for (int j = 0; j < g.size(); ++j) f[j] = (j % 2 == 0) ? 1.0 : -1.0;
  EXPECT_LT(derivative(f, 1).max_abs(), 1e-12);
  EXPECT_GT(derivative(f, 2).max_abs(), 1.0);
}

TEST(Multiplier, KIsSymmetricTilbertIsSkew) {
  const Grid g = Grid::make(128, 30.0);
  const Field f = random_smooth(g, 1, 20), h = random_smooth(g, 2, 20);
  EXPECT_NEAR(inner_product(tilbert_dx(f, 1.3), h), inner_product(f, tilbert_dx(h, 1.3)), 1e-11);
  const Multiplier T = Multiplier::tilbert(g, 1.3);
  EXPECT_NEAR(inner_product(apply_multiplier(f, T), h), -inner_product(f, apply_multiplier(h, T)), 1e-11);
}

TEST(Multiplier, CompositionMatchesSequentialApplication) {
  const Grid g = Grid::make(64, 12.0);
  const Field f = random_smooth(g, 3, 10);
  const Multiplier a = Multiplier::tilbert(g, 0.5), d = Multiplier::derivative(g, 1);
  const Field both = apply_multiplier(f, a * d);
  const Field seq = apply_multiplier(apply_multiplier(f, d), a);
  EXPECT_LT((both - seq).max_abs(), 1e-12);
  const Field kdx = apply_multiplier(f, Multiplier::tilbert_dx(g, 0.5));
  EXPECT_LT((kdx - both).max_abs(), 1e-11);
}

TEST(Pairing, ParsevalIdentity) {
  const Grid g = Grid::make(96, 17.0);
  const Field f = random_smooth(g, 4, 30, 2.0, 0.3), h = random_smooth(g, 5, 30, 1.0, -0.1);
  const auto cf = fourier_coefficients(f), ch = fourier_coefficients(h);
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k < cf.size(); ++k) s += cf[k] * std::conj(ch[k]);
  EXPECT_NEAR(inner_product(f, h), g.length() * s.real(), 1e-12 * g.length());
  EXPECT_NEAR(s.imag(), 0.0, 1e-14);
}

TEST(Pairing, SobolevNorms) {
  const Grid g = Grid::make(64, 2.0 * kPi);
  const Field s = Field::sample(g, [](double x) { return std::sin(3.0 * x); });
  EXPECT_NEAR(sobolev_norm(s, 0.0), l2_norm(s), 1e-13);
  EXPECT_NEAR(sobolev_norm(s, 1.0), std::sqrt(10.0) * l2_norm(s), 1e-12);
  EXPECT_NEAR(l2_norm(s), std::sqrt(kPi), 1e-13);
}

TEST(Field, Arithmetic) {
  const Grid g = Grid::make(16, 1.0);
  Field a = Field::sample(g, [](double x) { return x; });
  Field b = 2.0 * a;
  b.axpy(-1.0, a);
  EXPECT_LT((b - a).max_abs(), 1e-15);
  EXPECT_DOUBLE_EQ(hadamard(a, a)[0], 0.25);
  EXPECT_DOUBLE_EQ((-a)[0], 0.5);
}
