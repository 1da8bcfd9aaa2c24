#include "hklab/adapted.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace hklab {

VectorXcd tau_star(const VectorXcd& w) { return w.conjugate(); }

namespace {

// dPhi at p as a complex n x 2n matrix: columns are the derivatives of
// Phi(x, v) = exp^C_x(iv) in the real chart directions (dx, dv).
MatrixXcd phi_differential(const ManifoldSpec& spec, const TangentPoint& p,
                           const FlowOptions& opts) {
  const int n = spec.dim();
  auto L = JetLayout::get(2 * n, 1);
  VecX<Jet> state(2 * n);
  const Complex I(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    state(k) = Jet::variable(L, p.x(k), k);
    VectorXcd grad = VectorXcd::Zero(2 * n);
    grad(n + k) = I;  // beta = i(v + dv)
    state(n + k) = Jet::linear(L, I * p.v(k), std::span<const Complex>(grad.data(), 2 * n));
  }
  state = detail::flow_phase<Jet>(spec, std::move(state), Complex(1.0), opts.steps_for(1.0), opts);
  MatrixXcd d(n, 2 * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < 2 * n; ++c) d(r, c) = state(r).coeff_linear(c);
  return d;
}

}  // namespace

VectorXcd embed_v_minus(const ManifoldSpec& spec, const TangentPoint& p, const FlowOptions& opts) {
  const Complex I(0.0, 1.0);
  VectorXcd y = p.x.cast<Complex>();
  VectorXcd beta = I * p.v.cast<Complex>();
  return exp_c(spec, y, beta, 1.0, opts.steps_for(1.0), opts);
}

AlmostComplexValue adapted_j(const ManifoldSpec& spec, const TangentPoint& p,
                             const FlowOptions& opts) {
  const int n = spec.dim();
  const MatrixXcd dphi = phi_differential(spec, p, opts);

  // Realify: rows (Re Phi, Im Phi), columns already real.
  MatrixXd R(2 * n, 2 * n);
  R.topRows(n) = dphi.real();
  R.bottomRows(n) = dphi.imag();

  Eigen::JacobiSVD<MatrixXd> svd(R);
  const double smin = svd.singularValues()(2 * n - 1);
  const double smax = svd.singularValues()(0);
  const double cond = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond < opts.condition_limit))
    throw SingularityError("adapted_j: differential is singular (conjugate point?)", cond);

  // multiplication by i on (Re, Im) stacked coordinates
  MatrixXd mult_i = MatrixXd::Zero(2 * n, 2 * n);
  mult_i.topRightCorner(n, n) = -MatrixXd::Identity(n, n);
  mult_i.bottomLeftCorner(n, n) = MatrixXd::Identity(n, n);

  MatrixXd J = R.partialPivLu().solve(mult_i * R);
  return AlmostComplexValue{p, std::move(J)};
}

double leaf_holomorphicity_residual(const ManifoldSpec& spec, const VectorXd& x,
                                    const VectorXd& v, std::span<const double> p_grid,
                                    std::span<const double> q_grid, const FlowOptions& opts) {
  const int n = spec.dim();
  double residual = 0.0;
  for (double p : p_grid) {
    PhaseState g = geodesic_flow(spec, PhaseState{x.cast<Complex>(), v.cast<Complex>()},
                                 Complex(p), opts.steps_for(std::abs(p) + 0.1), opts);
    const VectorXd base = g.y.real();
    const VectorXd vel = g.beta.real();
    VectorXcd acc_c(n);
    {
      std::span<const Complex> ys(g.y.data(), n), bs(g.beta.data(), n);
      spec.acceleration<Complex>(ys, bs, std::span<Complex>(acc_c.data(), n));
    }
    const VectorXd acc = acc_c.real();
    for (double q : q_grid) {
      // F(p, q) = (gamma(p), q gamma'(p)); columns of dF in the (dx, dv) chart
      VectorXd Fp(2 * n), Fq(2 * n);
      Fp << vel, q * acc;
      Fq << VectorXd::Zero(n), vel;
      AlmostComplexValue J = adapted_j(spec, TangentPoint{base, q * vel}, opts);
      const double r1 = (J.J * Fp - Fq).cwiseAbs().maxCoeff();
      const double r2 = (J.J * Fq + Fp).cwiseAbs().maxCoeff();
      residual = std::max({residual, r1, r2});
    }
  }
  return residual;
}

namespace {

MatrixXd j_matrix(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v,
                  const FlowOptions& opts) {
  return adapted_j(spec, TangentPoint{x, v}, opts).J;
}

// d/d(coord dir) of the whole J matrix, central differences at h and h/2
// combined by one Richardson sweep.
MatrixXd j_derivative(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v, int dir,
                      double h, const FlowOptions& opts) {
  const int n = spec.dim();
  auto central = [&](double step) {
    VectorXd xp = x, vp = v, xm = x, vm = v;
    if (dir < n) {
      xp(dir) += step;
      xm(dir) -= step;
    } else {
      vp(dir - n) += step;
      vm(dir - n) -= step;
    }
    return MatrixXd((j_matrix(spec, xp, vp, opts) - j_matrix(spec, xm, vm, opts)) / (2 * step));
  };
  return (4.0 * central(h / 2) - central(h)) / 3.0;
}

}  // namespace

double nijenhuis_residual(const ManifoldSpec& spec, const TangentPoint& p, double fd_step,
                          const FlowOptions& opts) {
  const int dim = 2 * spec.dim();
  const MatrixXd J = j_matrix(spec, p.x, p.v, opts);

  std::vector<MatrixXd> dJ(dim);  // dJ[dir] = dJ/d(coord dir)
  for (int dir = 0; dir < dim; ++dir) dJ[dir] = j_derivative(spec, p.x, p.v, dir, fd_step, opts);

  // Jacobian of the field z -> J(z) e_col, applied to a vector.
  auto jacobian_apply = [&](int col, const VectorXd& along) {
    VectorXd out = VectorXd::Zero(dim);
    for (int dir = 0; dir < dim; ++dir) out += dJ[dir].col(col) * along(dir);
    return out;
  };

  double residual = 0.0;
  for (int a = 0; a < dim; ++a) {
    const VectorXd Ja = J.col(a);
    for (int b = a + 1; b < dim; ++b) {
      const VectorXd Jb = J.col(b);
      // N(e_a, e_b) = [Je_a, Je_b] - J[Je_a, e_b] - J[e_a, Je_b]  ([e_a, e_b] = 0)
      const VectorXd lie_JaJb = jacobian_apply(b, Ja) - jacobian_apply(a, Jb);
      const VectorXd lie_Ja_eb = -dJ[b].col(a);  // [Je_a, e_b] = -d(Je_a)/d e_b
      const VectorXd lie_ea_Jb = dJ[a].col(b);
      VectorXd nij = lie_JaJb - J * lie_Ja_eb - J * lie_ea_Jb;
      residual = std::max(residual, nij.cwiseAbs().maxCoeff());
    }
  }
  return residual;
}

}  // namespace hklab
