#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "ilw/scenario.hpp"
#include "ilw/soliton.hpp"

namespace ilw {

Field soliton_family(const Grid& g, const std::vector<double>& speeds, double delta,
                     const std::vector<double>& positions) {
  if (speeds.size() != positions.size()) throw InputError("speeds and positions differ in length");
  Field U(g);
  for (std::size_t j = 0; j < speeds.size(); ++j) U += sample_soliton(make_soliton(speeds[j], delta, positions[j]), g);
  return U;
}

namespace {

struct Modes {
  std::vector<Field> d1;  // d U / d x_j = -Q_j'
  std::vector<Field> d2;  // d^2 U / d x_j^2 = Q_j''
  Field U;
};

Modes family_modes(const Grid& g, const std::vector<SolitonParams>& params, const std::vector<double>& x) {
  Modes m{{}, {}, Field(g)};
  for (std::size_t j = 0; j < params.size(); ++j) {
    SolitonParams p = params[j];
    p.x0 = x[j];
    const Field q = sample_soliton(p, g);
    const Field dq = derivative(q, 1);
    m.U += q;
    m.d1.push_back(-dq);
    m.d2.push_back(derivative(dq, 1));
  }
  return m;
}

Eigen::VectorXd orthogonality(const Field& u, const Modes& m) {
  const Field r = u - m.U;
  Eigen::VectorXd J(m.d1.size());
  for (std::size_t j = 0; j < m.d1.size(); ++j) J(j) = inner_product(r, m.d1[j]);
  return J;
}

}  // namespace

ModulationFit modulate(const Field& u, const std::vector<double>& speeds, double delta,
                       const std::vector<double>& initial_positions, int max_iterations) {
  if (speeds.size() != initial_positions.size() || speeds.empty())
    throw InputError("modulate needs one initial position per speed");
  const Grid& g = u.grid();
  const int n = static_cast<int>(speeds.size());
  std::vector<SolitonParams> params;
  double amax = 0.0;
  for (double c : speeds) {
    params.push_back(solve_transcendental(c, delta));
    amax = std::max(amax, params.back().a);
  }

  ModulationFit fit;
  fit.positions = initial_positions;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(wrap_periodic(fit.positions[i] - fit.positions[j], g.length()));
      if (d < 2.0 / amax) {
        std::ostringstream os;
        os << "solitons overlap (separation " << d << " < 2/a_max = " << 2.0 / amax << ")";
        fit.diagnostic = os.str();
        fit.residuals.assign(n, std::numeric_limits<double>::quiet_NaN());
        return fit;
      }
    }

  const double target = 1e-10 * l2_norm(u);
  Modes m = family_modes(g, params, fit.positions);
  Eigen::VectorXd J = orthogonality(u, m);
  for (int it = 0; it < max_iterations; ++it) {
    fit.iterations = it;
    if (J.cwiseAbs().maxCoeff() <= target) {
      fit.converged = true;
      break;
    }
    // dJ_j/dx_k = -<dU/dx_k, dU/dx_j> + delta_jk <u - U, d^2U/dx_j^2>
    Eigen::MatrixXd Jac(n, n);
    const Field r = u - m.U;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jac(j, k) = -inner_product(m.d1[k], m.d1[j]);
        if (j == k) Jac(j, k) += inner_product(r, m.d2[j]);
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Jac);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-14 * std::pow(Jac.cwiseAbs().maxCoeff(), n)) {
      fit.diagnostic = "singular modulation Jacobian";
      break;
    }
    const Eigen::VectorXd step = lu.solve(-J);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> trial = fit.positions;
      for (int j = 0; j < n; ++j) trial[j] = wrap_periodic(trial[j] + lambda * step(j), g.length());
      Modes mt = family_modes(g, params, trial);
      const Eigen::VectorXd Jt = orthogonality(u, mt);
      if (Jt.norm() < J.norm()) {
        fit.positions = trial;
        m = std::move(mt);
        J = Jt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      fit.converged = J.cwiseAbs().maxCoeff() <= target;
      if (!fit.converged) fit.diagnostic = "step halving failed to reduce the residual";
      break;
    }
    fit.iterations = it + 1;
  }
  if (!fit.converged && J.cwiseAbs().maxCoeff() <= target) fit.converged = true;
  if (!fit.converged && fit.diagnostic.empty()) fit.diagnostic = "iteration limit reached";
  fit.residuals.assign(J.data(), J.data() + n);
  return fit;
}

}  // namespace ilw
