#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ilw/functionals.hpp"
#include "support.hpp"

using namespace ilw;
using ilw::testing::random_smooth;

namespace {

double directional_fd(int m, const Field& u, const Field& z, double delta, H3Form form) {
  const double e = 1e-5;
  Field up = u, um = u;
  up.axpy(e, z);
  um.axpy(-e, z);
  return (eval_H(m, up, delta, form) - eval_H(m, um, delta, form)) / (2.0 * e);
}

}  // namespace

TEST(Functionals, ConstantState) {
  const Grid g = Grid::make(32, 5.0);
  const double A = 0.7, d = 1.5, L = 5.0;
  const Field u = Field::sample(g, [&](double) { return A; });
  EXPECT_NEAR(eval_H(0, u, d), A * L, 1e-13);
  EXPECT_NEAR(eval_H(1, u, d), 0.5 * A * A * L, 1e-13);
  EXPECT_NEAR(eval_H(2, u, d), -L * A * A * A / 3.0, 1e-13);
  const double h3 = L * (std::pow(A, 4) / 4.0 - 5.0 * A * A * A / (12.0 * d));
  EXPECT_NEAR(eval_H(3, u, d, H3Form::display), h3, 1e-13);
  EXPECT_NEAR(eval_H(3, u, d, H3Form::conserved), h3, 1e-13);
}

TEST(Functionals, RejectsBadIndexAndDepth) {
  const Grid g = Grid::make(16, 1.0);
  const Field u(g);
  EXPECT_THROW(eval_H(4, u, 1.0), InputError);
  EXPECT_THROW(grad_H(0, u, 1.0), InputError);
  EXPECT_THROW(eval_H(2, u, 0.0), InputError);
}

TEST(Functionals, GradientsMatchDirectionalDifferences) {
  const Grid g = Grid::make(128, 30.0);
  for (H3Form form : {H3Form::conserved, H3Form::display})
    for (int s = 0; s < 4; ++s) {
      const Field u = random_smooth(g, 10 + s, 8, 1.2, 0.2);
      const Field z = random_smooth(g, 50 + s, 8);
      for (int m = 1; m <= 3; ++m) {
        const double ip = inner_product(grad_H(m, u, 0.8, form), z);
        EXPECT_NEAR(directional_fd(m, u, z, 0.8, form), ip, 1e-7 * (1.0 + std::abs(ip))) << m;
      }
    }
}

TEST(Functionals, HessianIsSymmetric) {
  const Grid g = Grid::make(64, 20.0);
  const Field u = random_smooth(g, 3, 6, 1.0, 0.4);
  const Field y = random_smooth(g, 4, 12), z = random_smooth(g, 5, 12);
  for (int m = 1; m <= 3; ++m)
    EXPECT_NEAR(inner_product(hessian_apply(m, u, y, 2.0), z), inner_product(y, hessian_apply(m, u, z, 2.0)), 1e-11);
}

TEST(Functionals, DisplayFormIsNotInvariant) {
  const Grid g = Grid::make(128, 40.0);
  const Field u = random_smooth(g, 21, 6, 1.0, 0.1);
  const double scale = l2_norm(grad_H(3, u, 1.0)) * l2_norm(derivative(grad_H(2, u, 1.0), 1));
  EXPECT_LT(std::abs(poisson_bracket(2, 3, u, 1.0, H3Form::conserved)), 1e-12 * scale);
  EXPECT_GT(std::abs(poisson_bracket(2, 3, u, 1.0, H3Form::display)), 1e-5 * scale);
}

TEST(Soliton, EulerLagrangeAndH3Eigenvalue) {
  const Grid g = Grid::make(1024, 60.0);
  for (double c : {0.6, 1.0, 2.0}) {
    const SolitonParams p = make_soliton(c, 1.0);
    const Field q = sample_soliton(p, g);
    EXPECT_LT(el_residual(p, g), 1e-9);
    Field r = grad_H(3, q, 1.0);
    r.axpy(-soliton_h3_eigenvalue(p), q);
    EXPECT_LT(l2_norm(r) / l2_norm(q), 1e-9) << c;
    Field r2 = grad_H(2, q, 1.0);
    r2.axpy(c, q);
    EXPECT_LT(l2_norm(r2) / l2_norm(q), 1e-9) << c;
  }
}

TEST(Multipliers, Vieta) {
  const MultiplierSet m = vieta({1.0, 2.0, 3.0});
  ASSERT_EQ(m.mu.size(), 3u);
  EXPECT_DOUBLE_EQ(m.mu[0], 6.0);
  EXPECT_DOUBLE_EQ(m.mu[1], 11.0);
  EXPECT_DOUBLE_EQ(m.mu[2], 6.0);
  EXPECT_LT(m.reconstruction_defect({1.0, 2.0, 3.0}), 1e-15);
  EXPECT_THROW(vieta({2.0, 1.0}), InputError);
  EXPECT_THROW(vieta({-1.0, 1.0}), InputError);
}

TEST(Multipliers, CriticalMultipliersZeroBothConstituents) {
  const auto mu = critical_multipliers(0.8, 1.9, 1.0);
  for (double c : {0.8, 1.9}) {
    const double l3 = soliton_h3_eigenvalue(make_soliton(c, 1.0));
    EXPECT_NEAR(l3 - mu[0] * c + mu[1], 0.0, 1e-13);
  }
}

TEST(GFormula, CriticalSpeedValueAndSmallArgument) {
  // c = 1/delta: kappa delta = pi/4, so G = 4 delta (1/(delta pi) + pi/(4 delta)).
  const double want = 4.0 / std::numbers::pi + std::numbers::pi;
  EXPECT_NEAR(G_formula(make_soliton(1.0, 1.0)), want, 1e-13);
  EXPECT_NEAR(want, 4.4148322, 1e-7);
  const double small = G_formula(make_soliton(1e-7, 1.0));
  EXPECT_TRUE(std::isfinite(small));
  EXPECT_GT(small, 0.0);
}

TEST(Lyapunov, AugmentedEqualsS2AtReference) {
  const Grid g = Grid::make(128, 40.0);
  const Field u = random_smooth(g, 8, 6, 0.8, 0.2);
  const ConstraintTargets t = constraint_targets(u, 2, 1.0);
  EXPECT_DOUBLE_EQ(eval_augmented(u, 1e3, t, 1.0, 2.0, 1.0), eval_S2(u, 1.0, 2.0, 1.0));
  EXPECT_NEAR(eval_S2(u, 1.0, 2.0, 1.0), eval_lyapunov(u, vieta({1.0, 2.0}).mu, 1.0), 1e-12);
  const Field d = grad_S2(u, 1.0, 2.0, 1.0) - grad_lyapunov(u, vieta({1.0, 2.0}).mu, 1.0);
  EXPECT_LT(d.max_abs(), 1e-12);
}
