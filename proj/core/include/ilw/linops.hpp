#pragma once

// Dense second-variation operators in the sample basis, inertia counting,
// constrained coercivity and the multiplier Hessian D.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "ilw/functionals.hpp"
#include "ilw/soliton.hpp"
#include "ilw/spectral.hpp"

namespace ilw {

using LinearOp = std::function<Field(const Field&)>;

struct SecondVariation {
  Grid grid;
  Eigen::MatrixXd matrix;
  std::string label;
  std::vector<double> params;
  /// max |M - M^T| before symmetrization
  double symmetry_defect = 0.0;

  Field apply(const Field& z) const;
};

/// Applies `op` to each canonical basis vector, then symmetrizes.
SecondVariation assemble(const Grid& g, const LinearOp& op, std::string label, std::vector<double> params = {});

SecondVariation assemble_Hpp(int m, const Field& u, double delta, H3Form form = H3Form::conserved);

enum class ComboKind {
  L1,         // H2'' + c H1''           speeds = {c}
  L2,         // H3'' + c H2''           speeds = {c}
  T1j,        // H3'' + mu1 H2'' + mu2 H1'' at a single soliton, speeds = {c1, c2}
  S2pp,       // same combination at an arbitrary state
  augmented,  // S2pp + C sum_j h g_j g_j^T, g_j = grad H_j(u), j = 1, 2
};

struct ComboParams {
  std::vector<double> speeds;
  double delta = 1.0;
  double penalty = 1e3;
  /// Overrides the Vieta multipliers for T1j / S2pp / augmented when non-empty.
  std::vector<double> multipliers;
  H3Form form = H3Form::conserved;
};

/// Matrix-free action of the combination.
LinearOp combo_operator(ComboKind kind, const Field& u, const ComboParams& p);
SecondVariation assemble_combo(ComboKind kind, const Field& u, const ComboParams& p);

const char* to_string(ComboKind kind) noexcept;

struct InertiaReport {
  std::vector<double> eigenvalues;  // ascending
  int n_neg = 0;
  int n_zero = 0;
  double zero_tol = 0.0;
  /// Smallest |lambda| outside the zero band.
  double gap = 0.0;
  bool resolved = false;
  /// Columns are eigenvectors (empty when not requested).
  Eigen::MatrixXd eigenvectors;
};

InertiaReport eig_inertia(const Eigen::MatrixXd& A, double zero_tol, bool vectors = true);
InertiaReport eig_inertia(const SecondVariation& A, double zero_tol, bool vectors = true);

/// 10 max ||A v|| / ||v|| over known kernel vectors, floored at 1e-12 max |A_ij|.
double calibrate_zero_tol(const SecondVariation& A, const std::vector<Field>& kernel);

struct ProjectedResult {
  double min_eig = 0.0;
  Field minimizer;
};

/// Minimum of <Az, z>/<z, z> over z orthogonal to the constraints. An optional
/// rank-one term `penalty_weight * h * v v^T` is added first (v = penalty_vector).
ProjectedResult projected_min_eig(const SecondVariation& A, const std::vector<Field>& constraints,
                                  const Field* penalty_vector = nullptr, double penalty_weight = 0.0);

/// -(c - 1/delta) / (2 a^2 sin^2(a delta))
double lambda1_formula(double c, double delta);

struct HessianD {
  int n = 0;
  /// A B R: symmetric Hessian of the minimal Lyapunov value in the multipliers.
  Eigen::MatrixXd D;
  /// A B without the index reversal.
  Eigen::MatrixXd D_literal;
  Eigen::MatrixXd A;  // J^{-T}, J_{mk} = d mu_m / d c_k
  Eigen::MatrixXd B;  // B_{kj} = dH_j / dc_k = (-1)^{j-1} (G_k / c_k) c_k^j
  std::vector<double> eigenvalues;
  int p_pos = 0;
  int p_pos_literal = 0;
  /// G_k prod_{i != k} (c_i - c_k): J^T D J is exactly this diagonal.
  std::vector<double> diagonal_form;
  /// (-1)^{n+1} (G_k / c_k) prod_{i != k} (c_i - c_k)
  std::vector<double> printed_diagonal;
  /// max |J^T D J - diag(diagonal_form)| relative to max |diagonal_form|
  double congruence_defect = 0.0;
  double asymmetry_literal = 0.0;
};

HessianD hessian_D(const std::vector<double>& speeds, double delta);

/// Per-soliton dU/dc_j for a superposition (same step policy as soliton_dc).
std::vector<Field> superposition_dc(const Superposition& s, const Grid& g);

struct PsiCheck {
  double residual = 0.0;       // ||S2'' Psi + U|| / ||U||
  double form_value = 0.0;     // <S2'' Psi, Psi>
  double predicted = 0.0;      // (G(c1) - G(c2)) / (c2 - c1)
  double plus_residual = 0.0;  // ||S2'' Psi - U|| / ||U||
};

/// U = Q_{c1}(x + separation/2) + Q_{c2}(x - separation/2),
/// Psi = (dU/dc1 - dU/dc2) / (c1 - c2).
PsiCheck psi_check(double c1, double c2, double separation, double delta, const Grid& g,
                   const std::vector<double>& multipliers = {}, H3Form form = H3Form::conserved);

struct TaylorFunctional {
  std::function<double(const Field&)> value;
  std::function<Field(const Field&)> gradient;
  LinearOp hessian;  // at the base point
};

/// |F(U + e z) - F(U) - e <F'(U), z> - e^2/2 <F''(U) z, z>| / e^3 for each e.
std::vector<double> taylor_remainders(const TaylorFunctional& f, const Field& U, const Field& z,
                                      const std::vector<double>& eps);

/// taylor_remainders for S2 with the given speeds (Vieta multipliers unless overridden).
std::vector<double> taylor_check(const Field& U, const Field& z, double c1, double c2, double delta,
                                 const std::vector<double>& eps, const std::vector<double>& multipliers = {},
                                 H3Form form = H3Form::conserved);

/// Angle between span{v} and w.
double subspace_angle(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

Eigen::VectorXd to_eigen(const Field& f);
Field from_eigen(const Grid& g, const Eigen::VectorXd& v);

}  // namespace ilw
