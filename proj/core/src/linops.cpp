#include "ilw/linops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ilw {

Eigen::VectorXd to_eigen(const Field& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data().data(), f.size());
}

Field from_eigen(const Grid& g, const Eigen::VectorXd& v) {
  return Field(g, std::vector<double>(v.data(), v.data() + v.size()));
}

Field SecondVariation::apply(const Field& z) const {
  require_same_grid(grid, z.grid(), "SecondVariation::apply");
  return from_eigen(grid, matrix * to_eigen(z));
}

SecondVariation assemble(const Grid& g, const LinearOp& op, std::string label, std::vector<double> params) {
  const int n = g.size();
  Eigen::MatrixXd M(n, n);
  Field e(g);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Field col = op(e);
    e[j] = 0.0;
    if (!col.all_finite()) throw NumericalError("operator produced non-finite entries");
    M.col(j) = to_eigen(col);
  }
  const double defect = (M - M.transpose()).cwiseAbs().maxCoeff();
  Eigen::MatrixXd S = 0.5 * (M + M.transpose());
  return SecondVariation{g, std::move(S), std::move(label), std::move(params), defect};
}

SecondVariation assemble_Hpp(int m, const Field& u, double delta, H3Form form) {
  if (m < 1 || m > 3) throw InputError("second variation index must be 1..3");
  std::ostringstream label;
  label << "H" << m << "''";
  return assemble(
      u.grid(), [&](const Field& z) { return hessian_apply(m, u, z, delta, form); }, label.str(), {delta});
}

const char* to_string(ComboKind kind) noexcept {
  switch (kind) {
    case ComboKind::L1: return "L1";
    case ComboKind::L2: return "L2";
    case ComboKind::T1j: return "T1j";
    case ComboKind::S2pp: return "S2pp";
    case ComboKind::augmented: return "augmented";
  }
  return "?";
}

LinearOp combo_operator(ComboKind kind, const Field& u, const ComboParams& p) {
  const double delta = p.delta;
  const H3Form form = p.form;
  switch (kind) {
    case ComboKind::L1:
    case ComboKind::L2: {
      if (p.speeds.size() != 1) throw InputError("L_m needs exactly one speed");
      const double c = p.speeds[0];
      const int m = kind == ComboKind::L1 ? 1 : 2;
      return [u, c, m, delta, form](const Field& z) {
        Field r = hessian_apply(m + 1, u, z, delta, form);
        r.axpy(c, hessian_apply(m, u, z, delta, form));
        return r;
      };
    }
    case ComboKind::T1j:
    case ComboKind::S2pp:
    case ComboKind::augmented: {
      if (p.speeds.size() != 2) throw InputError("two-soliton operators need two speeds");
      std::vector<double> mu = p.multipliers.empty() ? vieta(p.speeds).mu : p.multipliers;
      if (mu.size() != 2) throw InputError("two multipliers required");
      LinearOp base = [u, mu, delta, form](const Field& z) {
        Field r = hessian_apply(3, u, z, delta, form);
        r.axpy(mu[0], hessian_apply(2, u, z, delta, form));
        r.axpy(mu[1], z);
        return r;
      };
      if (kind != ComboKind::augmented) return base;
      if (!(p.penalty > 0.0)) throw InputError("penalty must be positive");
      const Field g1 = grad_H(1, u, delta, form);
      const Field g2 = grad_H(2, u, delta, form);
      const double C = p.penalty;
      return [base, g1, g2, C](const Field& z) {
        Field r = base(z);
        r.axpy(C * inner_product(g1, z), g1);
        r.axpy(C * inner_product(g2, z), g2);
        return r;
      };
    }
  }
  throw InputError("unknown operator kind");
}

SecondVariation assemble_combo(ComboKind kind, const Field& u, const ComboParams& p) {
  std::vector<double> params = p.speeds;
  params.push_back(p.delta);
  return assemble(u.grid(), combo_operator(kind, u, p), to_string(kind), params);
}

// ---------------------------------------------------------------- inertia

InertiaReport eig_inertia(const Eigen::MatrixXd& A, double zero_tol, bool vectors) {
  if (A.rows() != A.cols()) throw InputError("eig_inertia needs a square matrix");
  if (!(zero_tol >= 0.0)) throw InputError("zero_tol must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  InertiaReport r;
  r.zero_tol = zero_tol;
  r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  r.gap = std::numeric_limits<double>::infinity();
  for (double l : r.eigenvalues) {
    if (l < -zero_tol)
      ++r.n_neg;
    else if (l <= zero_tol)
      ++r.n_zero;
    else
      r.gap = std::min(r.gap, std::abs(l));
    if (l < -zero_tol) r.gap = std::min(r.gap, std::abs(l));
  }
  r.resolved = r.gap > 3.0 * zero_tol;
  if (vectors) r.eigenvectors = es.eigenvectors();
  return r;
}

InertiaReport eig_inertia(const SecondVariation& A, double zero_tol, bool vectors) {
  return eig_inertia(A.matrix, zero_tol, vectors);
}

double calibrate_zero_tol(const SecondVariation& A, const std::vector<Field>& kernel) {
  double worst = 0.0;
  for (const Field& v : kernel) {
    const Eigen::VectorXd x = to_eigen(v);
    const double nv = x.norm();
    if (nv == 0.0) throw InputError("kernel vector is zero");
    worst = std::max(worst, (A.matrix * x).norm() / nv);
  }
  return std::max(10.0 * worst, 1e-12 * A.matrix.cwiseAbs().maxCoeff());
}

ProjectedResult projected_min_eig(const SecondVariation& A, const std::vector<Field>& constraints,
                                  const Field* penalty_vector, double penalty_weight) {
  const int n = A.grid.size();
  Eigen::MatrixXd M = A.matrix;
  if (penalty_vector) {
    const Eigen::VectorXd v = to_eigen(*penalty_vector);
    M.noalias() += penalty_weight * A.grid.spacing() * v * v.transpose();
  }
  const int k = static_cast<int>(constraints.size());
  if (k >= n) throw InputError("too many constraints");
  Eigen::MatrixXd V(n, 0);
  if (k > 0) {
    Eigen::MatrixXd C(n, k);
    for (int j = 0; j < k; ++j) C.col(j) = to_eigen(constraints[j]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw InputError("constraint set is rank deficient");
    V = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  }
  // Restrict to the complement and shift the constraint directions far above the spectrum.
  if (k > 0) {
    const Eigen::MatrixXd MV = M * V;
    const Eigen::MatrixXd VtMV = V.transpose() * MV;
    M.noalias() -= MV * V.transpose();
    M.noalias() -= V * MV.transpose();
    M.noalias() += V * VtMV * V.transpose();
    const double shift = 2.0 * M.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    M.noalias() += shift * V * V.transpose();
  }
  M = 0.5 * (M + M.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  ProjectedResult r{es.eigenvalues()(0), from_eigen(A.grid, es.eigenvectors().col(0))};
  return r;
}

double lambda1_formula(double c, double delta) {
  const SolitonParams p = solve_transcendental(c, delta);
  const double s = std::sin(p.a * delta);
  return -(c - 1.0 / delta) / (2.0 * p.a * p.a * s * s);
}

// ---------------------------------------------------------------- Hessian D

namespace {
// e_m of the speeds with index `skip` removed, m = 0..n-1
std::vector<double> elementary_without(const std::vector<double>& c, std::size_t skip) {
  std::vector<double> e{1.0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i == skip) continue;
    std::vector<double> next(e.size() + 1, 0.0);
    for (std::size_t m = 0; m < e.size(); ++m) {
      next[m] += e[m];
      next[m + 1] += c[i] * e[m];
    }
    e = std::move(next);
  }
  return e;
}

int count_positive(const Eigen::VectorXd& ev, double tol) {
  int p = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > tol) ++p;
  return p;
}
}  // namespace

HessianD hessian_D(const std::vector<double>& speeds, double delta) {
  vieta(speeds);  // validates ordering
  const int n = static_cast<int>(speeds.size());
  HessianD h;
  h.n = n;
  std::vector<double> G(n);
  for (int k = 0; k < n; ++k) G[k] = G_formula(solve_transcendental(speeds[k], delta));

  Eigen::MatrixXd J(n, n);
  for (int k = 0; k < n; ++k) {
    const auto e = elementary_without(speeds, k);
    for (int m = 0; m < n; ++m) J(m, k) = e[m];
  }
  h.B.resize(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 1; j <= n; ++j)
      h.B(k, j - 1) = ((j - 1) % 2 == 0 ? 1.0 : -1.0) * G[k] / speeds[k] * std::pow(speeds[k], j);
  const Eigen::MatrixXd Jinv = J.fullPivLu().inverse();
  h.A = Jinv.transpose();
  h.D_literal = h.A * h.B;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) R(n - 1 - i, i) = 1.0;
  h.D = h.D_literal * R;
  h.asymmetry_literal = (h.D_literal - h.D_literal.transpose()).cwiseAbs().maxCoeff() /
                        std::max(1e-300, h.D_literal.cwiseAbs().maxCoeff());

  for (int k = 0; k < n; ++k) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != k) prod *= speeds[i] - speeds[k];
    h.diagonal_form.push_back(G[k] * prod);
    h.printed_diagonal.push_back(((n + 1) % 2 == 0 ? 1.0 : -1.0) * G[k] / speeds[k] * prod);
  }
  const Eigen::MatrixXd cong = J.transpose() * h.D * J;
  double dmax = 0.0;
  for (double d : h.diagonal_form) dmax = std::max(dmax, std::abs(d));
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) diag(k, k) = h.diagonal_form[k];
  h.congruence_defect = (cong - diag).cwiseAbs().maxCoeff() / dmax;

  const Eigen::MatrixXd Ds = 0.5 * (h.D + h.D.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ds, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on D");
  const double tol = 1e-12 * std::max(1.0, Ds.cwiseAbs().maxCoeff());
  h.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  h.p_pos = count_positive(es.eigenvalues(), tol);
  Eigen::EigenSolver<Eigen::MatrixXd> lit(h.D_literal, false);
  int pl = 0;
  for (int i = 0; i < n; ++i)
    if (lit.eigenvalues()(i).real() > tol) ++pl;
  h.p_pos_literal = pl;
  return h;
}

// ---------------------------------------------------------------- Psi / Taylor

std::vector<Field> superposition_dc(const Superposition& s, const Grid& g) {
  std::vector<Field> out;
  for (const auto& p : s.params) out.push_back(soliton_dc(p, g));
  return out;
}

PsiCheck psi_check(double c1, double c2, double separation, double delta, const Grid& g,
                   const std::vector<double>& multipliers, H3Form form) {
  if (!(c1 != c2)) throw InputError("psi_check needs distinct speeds");
  if (!(separation > 0.0)) throw InputError("separation must be positive");
  MultiSolitonSpec spec{{{c1, -0.5 * separation}, {c2, 0.5 * separation}}};
  const Superposition U = superpose(spec, delta, g);
  const auto dU = superposition_dc(U, g);
  Field psi = dU[0] - dU[1];
  psi *= 1.0 / (c1 - c2);

  ComboParams cp;
  cp.speeds = {c1, c2};
  cp.delta = delta;
  cp.multipliers = multipliers;
  cp.form = form;
  const Field Lpsi = combo_operator(ComboKind::S2pp, U.field, cp)(psi);
  const double nu = l2_norm(U.field);
  PsiCheck r;
  r.residual = l2_norm(Lpsi + U.field) / nu;
  r.plus_residual = l2_norm(Lpsi - U.field) / nu;
  r.form_value = inner_product(Lpsi, psi);
  r.predicted = (G_formula(solve_transcendental(c1, delta)) - G_formula(solve_transcendental(c2, delta))) / (c2 - c1);
  return r;
}

std::vector<double> taylor_remainders(const TaylorFunctional& f, const Field& U, const Field& z,
                                      const std::vector<double>& eps) {
  const double f0 = f.value(U);
  const double lin = inner_product(f.gradient(U), z);
  const double quad = inner_product(f.hessian(z), z);
  std::vector<double> out;
  for (double e : eps) {
    if (!(e > 0.0)) throw InputError("epsilon must be positive");
    Field ue = U;
    ue.axpy(e, z);
    const double rem = f.value(ue) - f0 - e * lin - 0.5 * e * e * quad;
    out.push_back(std::abs(rem) / (e * e * e));
  }
  return out;
}

std::vector<double> taylor_check(const Field& U, const Field& z, double c1, double c2, double delta,
                                 const std::vector<double>& eps, const std::vector<double>& multipliers,
                                 H3Form form) {
  const std::vector<double> mu = multipliers.empty() ? vieta({c1, c2}).mu : multipliers;
  ComboParams cp;
  cp.speeds = {c1, c2};
  cp.delta = delta;
  cp.multipliers = mu;
  cp.form = form;
  TaylorFunctional f{
      [&](const Field& u) { return eval_lyapunov(u, mu, delta, form); },
      [&](const Field& u) { return grad_lyapunov(u, mu, delta, form); },
      combo_operator(ComboKind::S2pp, U, cp),
  };
  return taylor_remainders(f, U, z, eps);
}

double subspace_angle(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  const double vv = v.squaredNorm();
  if (vv == 0.0 || w.squaredNorm() == 0.0) throw InputError("subspace_angle needs nonzero vectors");
  const double along = v.dot(w) / vv;
  const Eigen::VectorXd perp = w - along * v;
  return std::atan2(perp.norm(), std::abs(along) * std::sqrt(vv));
}

}  // namespace ilw
