#pragma once

// Conserved functionals H0..H3 of the ILW flow, their variational gradients,
// and the Lyapunov combinations built from them. K denotes T^delta d/dx
// (symbol -w) throughout.
//
//   H0 = int u
//   H1 = 1/2 int u^2
//   H2 = -int (u^3/3 + 1/2 u Ku + u^2/(2 delta))
//   H3 = int (u^4/4 + 3/4 u^2 Ku + 3/8 (Ku)^2 + u^3/(3 delta) + u Ku/(2 delta) + u^2/(8 delta^2))
//        [+ 1/8 int u_x^2 for H3Form::conserved]

#include <vector>

#include "ilw/soliton.hpp"
#include "ilw/spectral.hpp"

namespace ilw {

/// `display` is the six-term density above; it is not invariant under the
/// flow. `conserved` adds 1/8 int u_x^2, which makes it an exact invariant.
enum class H3Form { conserved, display };

double eval_H(int m, const Field& u, double delta, H3Form form = H3Form::conserved);

/// Variational gradient, exact adjoint of the discrete eval_H (m in 1..3).
Field grad_H(int m, const Field& u, double delta, H3Form form = H3Form::conserved);

/// Linearization of grad_H(m, .) at u applied to z.
Field hessian_apply(int m, const Field& u, const Field& z, double delta, H3Form form = H3Form::conserved);

/// || K Q + (1/delta - c) Q + Q^2 ||_{L2} for the sampled soliton.
double el_residual(const SolitonParams& p, const Grid& g);
/// Same residual for an arbitrary field and speed.
double el_residual(const Field& u, double c, double delta);

/// Lagrange multipliers mu_m = e_m(c_1..c_n), the elementary symmetric functions.
struct MultiplierSet {
  std::vector<double> mu;

  /// Largest relative coefficient defect of prod (x + c_m) - x^n - sum mu_m x^{n-m}.
  double reconstruction_defect(const std::vector<double>& speeds) const;
};

/// Throws InputError unless speeds are positive and strictly increasing.
MultiplierSet vieta(const std::vector<double>& speeds);

/// 4 delta (c sin^2(2 kappa delta) / (4 kappa delta - sin(4 kappa delta)) + kappa)
double G_formula(const SolitonParams& p);

/// H_{n+1} + sum_m mu_m H_{n+1-m}, n = mu.size() <= 2.
double eval_lyapunov(const Field& u, const std::vector<double>& mu, double delta,
                     H3Form form = H3Form::conserved);
Field grad_lyapunov(const Field& u, const std::vector<double>& mu, double delta,
                    H3Form form = H3Form::conserved);

/// S2 = H3 + (c1 + c2) H2 + c1 c2 H1.
double eval_S2(const Field& u, double c1, double c2, double delta, H3Form form = H3Form::conserved);
Field grad_S2(const Field& u, double c1, double c2, double delta, H3Form form = H3Form::conserved);

struct ConstraintTargets {
  std::vector<double> values;  // H_1(U), ..., H_n(U)
};

ConstraintTargets constraint_targets(const Field& reference, int n, double delta);

/// S2(u) + (C/2) sum_j (H_j(u) - target_j)^2.
double eval_augmented(const Field& u, double C, const ConstraintTargets& targets, double c1, double c2,
                      double delta, H3Form form = H3Form::conserved);

/// <grad H_i(u), d/dx grad H_j(u)>
double poisson_bracket(int i, int j, const Field& u, double delta, H3Form form = H3Form::conserved);

/// The scalar lambda with grad H3(Q_c) = lambda Q_c for the conserved H3:
/// 3/4 c^2 - c/(2 delta) - a^2/4.
double soliton_h3_eigenvalue(const SolitonParams& p);

/// Multipliers (mu1, mu2) that make the double-soliton Lyapunov gradient vanish
/// on each constituent: lambda3(c_j) - mu1 c_j + mu2 = 0 for j = 1, 2.
std::vector<double> critical_multipliers(double c1, double c2, double delta);

}  // namespace ilw
