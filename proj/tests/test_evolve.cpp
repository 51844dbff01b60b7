#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ilw/evolve.hpp"
#include "ilw/soliton.hpp"
#include "support.hpp"

using namespace ilw;
using ilw::testing::random_smooth;

TEST(Rhs, HamiltonianAndDirectFormsAgreeOnBandLimitedFields) {
  const Grid g = Grid::make(128, 25.0);
  const Field u = random_smooth(g, 9, 10, 1.0, 0.3);
  for (bool dealias : {true, false})
    EXPECT_LT((rhs(u, 0.9, dealias) - rhs_direct(u, 0.9, dealias)).max_abs(), 1e-11);
}

TEST(Rhs, SolitonIsATravelingWave) {
  const Grid g = Grid::make(1024, 60.0);
  const Field q = sample_soliton(make_soliton(1.0, 1.0), g);
  Field r = rhs(q, 1.0);
  r.axpy(1.0, derivative(q, 1));  // u_t = -c u_x
  EXPECT_LT(l2_norm(r), 1e-9);
}

TEST(Dealias, ZeroesUpperThird) {
  const int n = 48;
  std::vector<std::complex<double>> h(n / 2 + 1, 1.0);
  dealias_23(h, n);
  for (int k = 0; k <= n / 2; ++k) EXPECT_EQ(h[k] == 0.0, 3 * k >= n) << k;
}

TEST(Stepper, LinearFlowIsUnitaryAndPreservesMean) {
  const Grid g = Grid::make(256, 50.0);
  const Field u0 = random_smooth(g, 1, 60, 1.0, 0.5);
  Stepper s(g, 0.7, 0.01, false);
  s.set_state(u0);
  for (int i = 0; i < 1000; ++i) s.step();
  const Field u = s.state();
  EXPECT_NEAR(l2_norm(u), l2_norm(u0), 1e-13 * l2_norm(u0));
  double m0 = 0, m1 = 0;
  for (int j = 0; j < g.size(); ++j) {
    m0 += u0[j];
    m1 += u[j];
  }
  EXPECT_NEAR(m1, m0, 1e-11);
}

TEST(Stepper, LinearSingleModeRotatesExactly) {
  // u = cos(q x) evolves as cos(q x - omega t), omega = q (1/delta - w).
  const Grid g = Grid::make(64, 20.0);
  const int m = 3;
  const double delta = 1.3, xi = m / g.length(), q = 2.0 * std::numbers::pi * xi;
  const double omega = q * (1.0 / delta - dispersion_w(xi, delta));
  Stepper s(g, delta, 0.05, false);
  s.set_state(Field::sample(g, [&](double x) { return std::cos(q * x); }));
  for (int i = 0; i < 200; ++i) s.step();
  const Field u = s.state();
  for (int j = 0; j < g.size(); ++j) EXPECT_NEAR(u[j], std::cos(q * g.x(j) - omega * 10.0), 1e-12);
}

TEST(Stepper, SingleStepHelperMatchesStepper) {
  const Grid g = Grid::make(128, 30.0);
  const Field u = sample_soliton(make_soliton(1.0, 1.0), g);
  Stepper s(g, 1.0, 0.01);
  s.set_state(u);
  s.step();
  EXPECT_LT((s.state() - step_ifrk4(u, 0.01, 1.0)).max_abs(), 1e-15);
}

TEST(Run, RecordsAndBlowUp) {
  const Grid g = Grid::make(256, 40.0);
  EvolveConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 1.0;
  cfg.record_stride = 25;
  const RunResult r = run(sample_soliton(make_soliton(1.0, 1.0), g), cfg, 1.0);
  EXPECT_EQ(r.steps, 100);
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_DOUBLE_EQ(r.trace.back().t, 1.0);
  EXPECT_GT(r.cfl, 0.0);
  ASSERT_EQ(r.trace[2].peaks.size(), 1u);
  EXPECT_NEAR(r.trace[2].peaks[0].position, 0.5, 1e-6);

  EvolveConfig wild = cfg;
  wild.dt = 0.5;
  wild.T = 200.0;
  EXPECT_THROW(run(random_smooth(g, 2, 100, 50.0), wild, 1.0), NumericalError);
}

TEST(Peaks, OffGridPositionsAndOrdering) {
  const Grid g = Grid::make(2048, 80.0);
  const Superposition s = superpose(MultiSolitonSpec{{{0.6, -20.713}, {1.8, 13.3217}}}, 1.0, g);
  const auto peaks = track_peaks(s.field, 0.05);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_NEAR(peaks[0].position, 13.3217, 1e-8);
  EXPECT_NEAR(peaks[1].position, -20.713, 1e-8);
  EXPECT_NEAR(peaks[0].height, s.params[1].peak(), 1e-9);
  EXPECT_GT(peaks[0].height, peaks[1].height);
}

TEST(Peaks, SpeedFitUnwraps) {
  std::vector<std::pair<double, double>> series;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.5 * i;
    series.emplace_back(t, wrap_periodic(5.0 + 1.5 * t, 20.0));
  }
  const SpeedFit f = fit_speed(series, 20.0);
  EXPECT_NEAR(f.speed, 1.5, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Limits, SurrogateErrors) {
  const auto e = limit_symbol_errors(2.0, {0.0, 5e-4, 5.0});
  EXPECT_EQ(e[0].kdv_err, 0.0);
  EXPECT_LT(e[1].kdv_err, 1e-5);
  EXPECT_LT(e[2].bo_err, 1e-12);
  EXPECT_THROW(limit_symbol_errors(-1.0, {1.0}), InputError);
}
