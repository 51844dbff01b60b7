#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ilw/linops.hpp"
#include "support.hpp"

using namespace ilw;
using ilw::testing::random_smooth;

TEST(Assemble, MatchesMatrixFreeAction) {
  const Grid g = Grid::make(64, 20.0);
  const Field u = random_smooth(g, 4, 6, 1.0, 0.2);
  for (int m = 1; m <= 3; ++m) {
    const SecondVariation A = assemble_Hpp(m, u, 1.0);
    EXPECT_LT(A.symmetry_defect, 1e-10 * A.matrix.cwiseAbs().maxCoeff());
    const Field z = random_smooth(g, 7, 10);
    EXPECT_LT((A.apply(z) - hessian_apply(m, u, z, 1.0)).max_abs(), 1e-11);
  }
}

TEST(Assemble, HessianMatchesGradientDifferences) {
  const Grid g = Grid::make(64, 20.0);
  const Field u = random_smooth(g, 5, 6, 1.0, 0.3);
  const Field z = random_smooth(g, 6, 6);
  const double e = 1e-5;
  for (int m = 2; m <= 3; ++m) {
    Field up = u, um = u;
    up.axpy(e, z);
    um.axpy(-e, z);
    Field fd = grad_H(m, up, 1.0) - grad_H(m, um, 1.0);
    fd *= 0.5 / e;
    const Field Az = assemble_Hpp(m, u, 1.0).apply(z);
    EXPECT_LT(l2_norm(Az - fd) / l2_norm(Az), 1e-8) << m;
  }
}

TEST(Inertia, L1AtZeroIsTheShiftedSymbol) {
  const Grid g = Grid::make(64, 15.0);
  const double c = 0.4, delta = 0.8;
  ComboParams cp;
  cp.speeds = {c};
  cp.delta = delta;
  const InertiaReport r = eig_inertia(assemble_combo(ComboKind::L1, Field(g), cp), 1e-12, false);
  std::vector<double> symbol;
  for (int i = 0; i < g.size(); ++i) symbol.push_back(dispersion_w(g.frequency(g.wavenumber(i)), delta) + c - 1.0 / delta);
  std::sort(symbol.begin(), symbol.end());
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(r.eigenvalues[i], symbol[i], 1e-11);
  EXPECT_EQ(r.n_neg, 0);
}

TEST(Inertia, CountsAndGap) {
  Eigen::MatrixXd D = Eigen::VectorXd::LinSpaced(6, -2.0, 3.0).asDiagonal();
  D(2, 2) = 1e-14;
  const InertiaReport r = eig_inertia(D, 1e-10);
  EXPECT_EQ(r.n_neg, 2);
  EXPECT_EQ(r.n_zero, 1);
  EXPECT_DOUBLE_EQ(r.gap, 1.0);
  EXPECT_TRUE(r.resolved);
  EXPECT_THROW(eig_inertia(Eigen::MatrixXd(2, 3), 0.0), InputError);
  EXPECT_THROW(eig_inertia(D, -1.0), InputError);
}

TEST(Inertia, L1AtSolitonHasOneNegativeDirection) {
  const Grid g = Grid::make(256, 40.0);
  const Field q = sample_soliton(make_soliton(1.0, 1.0), g);
  ComboParams cp;
  cp.speeds = {1.0};
  const SecondVariation L1 = assemble_combo(ComboKind::L1, q, cp);
  const Field qx = derivative(q, 1);
  const InertiaReport r = eig_inertia(L1, calibrate_zero_tol(L1, {qx}));
  EXPECT_EQ(r.n_neg, 1);
  EXPECT_EQ(r.n_zero, 1);
  EXPECT_TRUE(r.resolved);
  EXPECT_LT(subspace_angle(r.eigenvectors.col(1), to_eigen(qx)), 1e-4);
}

TEST(Projection, ConstrainedMinimum) {
  const Grid g = Grid::make(16, 1.0);
  SecondVariation A{g, Eigen::MatrixXd::Zero(16, 16), "diag", {}, 0.0};
  for (int i = 0; i < 16; ++i) A.matrix(i, i) = i == 0 ? -1.0 : 2.0 + i;
  Field e0(g);
  e0[0] = 1.0;
  EXPECT_NEAR(projected_min_eig(A, {}).min_eig, -1.0, 1e-12);
  EXPECT_NEAR(projected_min_eig(A, {e0}).min_eig, 3.0, 1e-12);
  const double w = 10.0 / g.spacing();
  EXPECT_NEAR(projected_min_eig(A, {}, &e0, w).min_eig, 3.0, 1e-12);
}

TEST(HessianD, SymmetricCongruentAndAlternating) {
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> c;
    for (int k = 0; k < n; ++k) c.push_back(0.5 + 0.7 * k);
    const HessianD h = hessian_D(c, 1.0);
    EXPECT_LT((h.D - h.D.transpose()).cwiseAbs().maxCoeff(), 1e-10 * h.D.cwiseAbs().maxCoeff());
    EXPECT_LT(h.congruence_defect, 1e-10);
    EXPECT_EQ(h.p_pos, (n + 1) / 2);
    for (int k = 0; k < n; ++k) EXPECT_EQ(h.diagonal_form[k] > 0, k % 2 == 0);
    if (n >= 2) EXPECT_GT(h.asymmetry_literal, 1e-3);
  }
  EXPECT_THROW(hessian_D({2.0, 1.0}, 1.0), InputError);
}

TEST(Taylor, CubicRemainderForS2) {
  const Grid g = Grid::make(128, 40.0);
  const Field U = random_smooth(g, 31, 6, 1.0, 0.2);
  const Field z = random_smooth(g, 32, 6);
  const auto r = taylor_check(U, z, 1.0, 2.0, 1.0, {1e-2, 5e-3, 2.5e-3});
  EXPECT_NEAR(r[1] / r[0], 1.0, 0.05);
  EXPECT_NEAR(r[2] / r[1], 1.0, 0.05);
}

TEST(Formulas, Lambda1AndAngles) {
  EXPECT_NEAR(lambda1_formula(1.0, 1.0), 0.0, 1e-15);
  Eigen::VectorXd v(3), w(3);
  v << 1.0, 2.0, 3.0;
  w << 0.0, 3.0, -2.0;
  EXPECT_NEAR(subspace_angle(v, -2.0 * v), 0.0, 1e-15);
  EXPECT_NEAR(subspace_angle(v, w), std::numbers::pi / 2.0, 1e-15);
  Eigen::VectorXd t = v;
  t(0) += 1e-10;
  EXPECT_GT(subspace_angle(v, t), 1e-12);
}

TEST(Psi, ReportsBothSignConventions) {
  const Grid g = Grid::make(512, 100.0);
  const PsiCheck p = psi_check(1.0, 2.0, 40.0, 1.0, g);
  EXPECT_TRUE(std::isfinite(p.residual));
  EXPECT_TRUE(std::isfinite(p.plus_residual));
  EXPECT_LT(p.predicted, 0.0);
  EXPECT_THROW(psi_check(1.0, 1.0, 40.0, 1.0, g), InputError);
}
