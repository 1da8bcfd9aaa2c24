#include "hklab/metric_forms.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hklab/normal_bundle.hpp"

namespace hklab {

namespace {
const Complex kI(0.0, 1.0);
}

double theta(const ManifoldSpec& spec, const TangentPoint& z, const VectorXd& a) {
  const int n = spec.dim();
  if (a.size() != 2 * n) throw StructuralError("theta: direction must have size 2n");
  const MatrixXd g = spec.metric_at_real(z.x);
  return z.v.dot(g * a.head(n));
}

Complex theta_tilde(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& beta,
                    const VectorXcd& dy, const VectorXcd& dbeta) {
  (void)dbeta;  // the pairing only sees the base direction
  const MatrixXcd g = spec.metric_at(y);
  return (beta.transpose() * g * dy)(0);
}

NormalSectionValue NormalSectionBasis::value(int idx, Complex zeta) const {
  if (idx < 0 || idx >= size()) throw StructuralError("normal section index out of range");
  const int group = idx / n_;
  const int j = idx % n_;
  VectorXcd ej = VectorXcd::Zero(n_);
  ej(j) = 1.0;
  NormalSectionValue s;
  switch (group) {
    case 0:  // A = e_j
      s.dy = ej;
      s.dbeta = VectorXcd::Zero(n_);
      break;
    case 1:  // A = i e_j
      s.dy = kI * ej;
      s.dbeta = 2.0 * kI * zeta * ej;
      break;
    case 2:  // C0 = e_j
      s.dy = zeta * ej;
      s.dbeta = (1.0 + zeta * zeta) * ej;
      break;
    default:  // C0 = i e_j
      s.dy = -kI * zeta * ej;
      s.dbeta = kI * (1.0 - zeta * zeta) * ej;
      break;
  }
  return s;
}

double NormalSectionBasis::gluing_residual(int degree_cap) const {
  // Stack each basis element as the polynomial coefficient vector of the h^0
  // linear system for the adapted model and measure how far it is from the
  // null space.
  const NormalBundleModel model = NormalBundleModel::adapted(n_, 0);
  const int D = degree_cap;
  double residual = 0.0;
  for (int idx = 0; idx < size(); ++idx) {
    // coefficients of dy (components 0..n-1) and dbeta (components n..2n-1);
    // dy is linear and dbeta quadratic, so values at zeta = 0, 1, -1 pin them
    std::vector<VectorXcd> coeff(2 * n_, VectorXcd::Zero(D + 1));
    const NormalSectionValue v0 = value(idx, 0.0);
    const NormalSectionValue v1 = value(idx, 1.0);
    const NormalSectionValue vm = value(idx, -1.0);
    for (int c = 0; c < n_; ++c) {
      coeff[c](0) = v0.dy(c);
      coeff[c](1) = 0.5 * (v1.dy(c) - vm.dy(c));
      coeff[c](2) = 0.5 * (v1.dy(c) + vm.dy(c)) - v0.dy(c);
      coeff[n_ + c](0) = v0.dbeta(c);
      coeff[n_ + c](1) = 0.5 * (v1.dbeta(c) - vm.dbeta(c));
      coeff[n_ + c](2) = 0.5 * (v1.dbeta(c) + vm.dbeta(c)) - v0.dbeta(c);
    }
    // forbidden Laurent exponents of T(zeta) P(zeta), as in normal_bundle_h0
    for (int e = -2; e <= D; ++e) {
      if (e <= 0 && e >= -D) continue;
      VectorXcd row = VectorXcd::Zero(2 * n_);
      for (const auto& [m, mat] : model.transition.terms) {
        const int j = e - m;
        if (j < 0 || j > D) continue;
        for (int r = 0; r < 2 * n_; ++r)
          for (int c = 0; c < 2 * n_; ++c)
            if (mat(r, c) != 0.0) row(r) += mat(r, c) * coeff[c](j);
      }
      residual = std::max(residual, row.cwiseAbs().maxCoeff());
    }
  }
  return residual;
}

double NormalSectionBasis::reality_residual() const {
  // sigma sends the patch-zero value at zeta to the conjugated data placed at
  // -conj(zeta) in the other patch; on the linearized model the tilde value
  // is [[I, -1/z I],[0, 1/z^2 I]] applied at 1/zeta-image.  Equivalently:
  // conj(dbeta(zeta)) = dbeta~(-conj zeta), conj(dy(zeta)) = dy~(-conj zeta).
  double residual = 0.0;
  for (int idx = 0; idx < size(); ++idx) {
    for (const Complex& zeta : default_zeta_grid(6)) {
      const NormalSectionValue v = value(idx, zeta);
      const Complex zt = -std::conj(zeta);        // infinity coordinate of the image
      const Complex z0 = Complex(1.0) / zt;       // its patch-zero coordinate
      const NormalSectionValue w = value(idx, z0);
      const VectorXcd dy_t = w.dy - w.dbeta / z0;
      const VectorXcd dbeta_t = w.dbeta / (z0 * z0);
      residual = std::max(residual, (v.dy.conjugate() - dy_t).cwiseAbs().maxCoeff());
      residual = std::max(residual, (v.dbeta.conjugate() - dbeta_t).cwiseAbs().maxCoeff());
    }
  }
  return residual;
}

Complex omega_fiber(const ManifoldSpec& spec, const VectorXcd& y0, const VectorXcd& beta0,
                    const NormalSectionValue& s1, const NormalSectionValue& s2) {
  const int n = spec.dim();
  auto L = JetLayout::get(1, 1);
  auto directional = [&](const NormalSectionValue& dir, const NormalSectionValue& frozen) {
    // d/de of Theta~(frozen) along (y0, beta0) + e dir
    std::vector<Jet> y(n), beta(n);
    for (int k = 0; k < n; ++k) {
      const std::array<Complex, 1> gy{dir.dy(k)};
      const std::array<Complex, 1> gb{dir.dbeta(k)};
      y[k] = Jet::linear(L, y0(k), gy);
      beta[k] = Jet::linear(L, beta0(k), gb);
    }
    Jet acc = Jet::constant(L, 0.0);
    std::span<const Jet> ys(y.data(), n);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        const Expr& gkl = spec.metric_entry(k, l);
        if (gkl.is_zero()) continue;
        acc += gkl.eval<Jet>(ys) * beta[k] * Jet(frozen.dy(l));
      }
    }
    return acc.coeff_linear(0);
  };
  return directional(s1, s2) - directional(s2, s1);
}

namespace {

// Real-linear evaluation matrix of the basis at zeta: columns are
// (Re dy, Im dy, Re dbeta, Im dbeta).
MatrixXd evaluation_matrix(const NormalSectionBasis& basis, Complex zeta) {
  const int n = basis.dim();
  MatrixXd ev(4 * n, basis.size());
  for (int idx = 0; idx < basis.size(); ++idx) {
    const NormalSectionValue v = basis.value(idx, zeta);
    ev.block(0, idx, n, 1) = v.dy.real();
    ev.block(n, idx, n, 1) = v.dy.imag();
    ev.block(2 * n, idx, n, 1) = v.dbeta.real();
    ev.block(3 * n, idx, n, 1) = v.dbeta.imag();
  }
  return ev;
}

MatrixXd evaluation_structure(const NormalSectionBasis& basis, Complex zeta) {
  const int n = basis.dim();
  MatrixXd mult_i = MatrixXd::Zero(4 * n, 4 * n);
  mult_i.block(0, n, n, n) = -MatrixXd::Identity(n, n);
  mult_i.block(n, 0, n, n) = MatrixXd::Identity(n, n);
  mult_i.block(2 * n, 3 * n, n, n) = -MatrixXd::Identity(n, n);
  mult_i.block(3 * n, 2 * n, n, n) = MatrixXd::Identity(n, n);
  const MatrixXd ev = evaluation_matrix(basis, zeta);
  return ev.partialPivLu().solve(mult_i * ev);
}

}  // namespace

FormTriple omega_triple_at_x(const ManifoldSpec& spec, const VectorXd& x) {
  if (!spec.has_metric()) throw DomainError("omega_triple_at_x: spec has no metric");
  const int n = spec.dim();
  const NormalSectionBasis basis(n);
  const int N = basis.size();
  const VectorXcd y0 = x.cast<Complex>();
  const VectorXcd beta0 = VectorXcd::Zero(n);

  auto omega_matrix = [&](Complex zeta) {
    MatrixXcd M = MatrixXcd::Zero(N, N);
    for (int a = 0; a < N; ++a) {
      const NormalSectionValue sa = basis.value(a, zeta);
      for (int b = a + 1; b < N; ++b) {
        const NormalSectionValue sb = basis.value(b, zeta);
        const Complex w = omega_fiber(spec, y0, beta0, sa, sb);
        M(a, b) = w;
        M(b, a) = -w;
      }
    }
    return M;
  };

  const MatrixXcd m_at_0 = omega_matrix(0.0);
  const MatrixXcd m_at_1 = omega_matrix(1.0);
  const MatrixXcd m_at_i = omega_matrix(kI);
  const MatrixXcd m_at_m1 = omega_matrix(-1.0);

  // quadratic pencil M0 + M1 z + M2 z^2 through the first three samples:
  // adding m(1) + m(i) cancels M2 since 1 + i^2 = 0
  const MatrixXcd M0 = m_at_0;
  const MatrixXcd M1 = (m_at_1 + m_at_i - 2.0 * M0) / (1.0 + kI);
  const MatrixXcd M2 = m_at_1 - M0 - M1;

  FormTriple out;
  out.fit_residual = (m_at_m1 - (M0 - M1 + M2)).cwiseAbs().maxCoeff();

  const MatrixXcd omega1_c = M1 / (2.0 * kI);
  const MatrixXcd omega2_c = (M0 + M2) / 2.0;
  const MatrixXcd omega3_c = (M0 - M2) / (2.0 * kI);
  out.imag_residual = std::max({omega1_c.imag().cwiseAbs().maxCoeff(),
                                omega2_c.imag().cwiseAbs().maxCoeff(),
                                omega3_c.imag().cwiseAbs().maxCoeff()});
  out.omega1 = omega1_c.real();
  out.omega2 = omega2_c.real();
  out.omega3 = omega3_c.real();

  const MatrixXd j1 = evaluation_structure(basis, 0.0);
  const MatrixXd j2 = evaluation_structure(basis, kI);
  const MatrixXd j3 = -evaluation_structure(basis, 1.0);

  const MatrixXd g1 = j1.transpose() * out.omega1;
  const MatrixXd g2 = j2.transpose() * out.omega2;
  const MatrixXd g3 = j3.transpose() * out.omega3;
  out.metric_agreement = std::max((g1 - g2).cwiseAbs().maxCoeff(),
                                  (g1 - g3).cwiseAbs().maxCoeff());
  out.metric = 0.5 * (g1 + g1.transpose());
  out.base = point_section(spec, TangentPoint{x, VectorXd::Zero(n)});
  return out;
}

std::pair<int, int> signature_at_x(const ManifoldSpec& spec, const VectorXd& x,
                                   double floor_scale) {
  const FormTriple triple = omega_triple_at_x(spec, x);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(triple.metric);
  const double floor = floor_scale * es.eigenvalues().cwiseAbs().maxCoeff();
  int pos = 0, neg = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > floor) ++pos;
    else if (ev < -floor) ++neg;
    else
      throw SingularityError("signature_at_x: near-zero eigenvalue of G",
                             es.eigenvalues().cwiseAbs().maxCoeff() / std::abs(ev));
  }
  return {pos, neg};
}

namespace {

// Central-difference variation of the point-section family in a chart
// direction: a pair of perturbed sections whose gap at each zeta is the
// variation value there.
struct SectionVariation {
  Section plus, minus;
  double step;

  NormalSectionValue at(Complex zeta) const {
    const TwistorPoint pp = plus.eval_zero(zeta);
    const TwistorPoint pm = minus.eval_zero(zeta);
    return NormalSectionValue{(pp.y - pm.y) / (2 * step), (pp.beta - pm.beta) / (2 * step)};
  }
};

SectionVariation section_variation(const ManifoldSpec& spec, const VectorXd& x,
                                   const VectorXd& v, const VectorXd& dir, double step,
                                   const FlowOptions& opts) {
  const int n = spec.dim();
  TangentPoint plus{x + step * dir.head(n), v + step * dir.tail(n)};
  TangentPoint minus{x - step * dir.head(n), v - step * dir.tail(n)};
  return SectionVariation{point_section(spec, plus, opts), point_section(spec, minus, opts),
                          step};
}

}  // namespace

double lempert_szoke_residual(const ManifoldSpec& spec, std::span<const MetricSample> samples,
                              double section_step, double theta_step, const FlowOptions& opts) {
  if (!spec.has_metric()) throw DomainError("lempert_szoke_residual: spec has no metric");
  const std::array<Complex, 5> zetas = {Complex(0.0), Complex(1.0), kI, Complex(-1.0), -kI};
  double residual = 0.0;
  for (const MetricSample& sample : samples) {
    Section base = point_section(spec, TangentPoint{sample.x, sample.v}, opts);
    const SectionVariation var1 =
        section_variation(spec, sample.x, sample.v, sample.a1, section_step, opts);
    const SectionVariation var2 =
        section_variation(spec, sample.x, sample.v, sample.a2, section_step, opts);
    // omega(zeta) on the two variations, then the coefficient of zeta / 2i
    Eigen::Matrix<Complex, 5, 1> values;
    for (int k = 0; k < 5; ++k) {
      const TwistorPoint p = base.eval_zero(zetas[k]);
      values(k) = omega_fiber(spec, p.y, p.beta, var1.at(zetas[k]), var2.at(zetas[k]));
    }
    Eigen::Matrix<Complex, 5, 3> vander;
    for (int k = 0; k < 5; ++k) {
      vander(k, 0) = 1.0;
      vander(k, 1) = zetas[k];
      vander(k, 2) = zetas[k] * zetas[k];
    }
    const Eigen::Vector3cd fit =
        vander.colPivHouseholderQr().solve(values);
    const double omega1_value = (fit(1) / (2.0 * kI)).real();

    // dTheta by central differences with one Richardson sweep
    auto theta_at = [&](const VectorXd& shift, const VectorXd& dir) {
      TangentPoint z{sample.x + shift.head(spec.dim()), sample.v + shift.tail(spec.dim())};
      return theta(spec, z, dir);
    };
    auto dtheta = [&](double h) {
      const double d1 = (theta_at(h * sample.a1, sample.a2) - theta_at(-h * sample.a1, sample.a2)) / (2 * h);
      const double d2 = (theta_at(h * sample.a2, sample.a1) - theta_at(-h * sample.a2, sample.a1)) / (2 * h);
      return d1 - d2;
    };
    const double dtheta_value = (4.0 * dtheta(theta_step / 2) - dtheta(theta_step)) / 3.0;
    residual = std::max(residual, std::abs(omega1_value - dtheta_value));
  }
  return residual;
}

double jacobi_identity_residual(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v,
                                const VectorXcd& u0, const VectorXcd& u0dot_cov,
                                const FlowOptions& opts) {
  if (!spec.has_metric()) throw DomainError("jacobi_identity_residual: spec has no metric");
  const int n = spec.dim();
  const VectorXcd xc = x.cast<Complex>();
  const VectorXcd iv = kI * v.cast<Complex>();
  // plain-derivative seed: Du = u' + Gamma(gamma', u)
  VectorXcd correction(n);
  {
    std::span<const Complex> ys(xc.data(), n), vel(iv.data(), n), w(u0.data(), n);
    spec.transport_derivative<Complex>(ys, vel, w, std::span<Complex>(correction.data(), n));
  }
  const VectorXcd u0dot_plain = u0dot_cov + correction;  // correction = -Gamma(iv, u0)

  const double grid[] = {0.0, 1.0};
  auto samples = jacobi_field(spec, xc, iv, u0, u0dot_plain, grid, opts.steps_per_unit, opts);
  PhaseState end = geodesic_flow(spec, PhaseState{xc, iv}, 1.0, opts.steps_for(1.0), opts);

  auto pair = [&](const VectorXcd& at, const VectorXcd& a, const VectorXcd& b) {
    return (a.transpose() * spec.metric_at(at) * b)(0);
  };
  const Complex lhs = pair(end.y, end.beta, samples[1].u);
  const Complex rhs = pair(xc, iv, u0) + pair(xc, iv, u0dot_cov);
  return std::abs(lhs - rhs);
}

JacobiDecomposition decompose_jacobi_field(const ManifoldSpec& spec, const VectorXd& x,
                                           const VectorXd& v, const VectorXcd& u0,
                                           const VectorXcd& u0dot_cov,
                                           std::span<const double> t_grid,
                                           const FlowOptions& opts) {
  if (!spec.has_metric()) throw DomainError("decompose_jacobi_field: spec has no metric");
  const int n = spec.dim();
  const VectorXcd xc = x.cast<Complex>();
  const VectorXcd iv = kI * v.cast<Complex>();
  VectorXcd correction(n);
  {
    std::span<const Complex> ys(xc.data(), n), vel(iv.data(), n), w(u0.data(), n);
    spec.transport_derivative<Complex>(ys, vel, w, std::span<Complex>(correction.data(), n));
  }
  const VectorXcd u0dot_plain = u0dot_cov + correction;

  auto pair = [&](const VectorXcd& at, const VectorXcd& a, const VectorXcd& b) {
    return (a.transpose() * spec.metric_at(at) * b)(0);
  };
  const Complex speed2 = pair(xc, iv, iv);
  if (std::abs(speed2) < 1e-14)
    throw DomainError("decompose_jacobi_field: null geodesic speed");

  JacobiDecomposition out;
  out.lambda = pair(xc, iv, u0) / speed2;
  out.mu = pair(xc, iv, u0dot_cov) / speed2;

  auto samples = jacobi_field(spec, xc, iv, u0, u0dot_plain, t_grid, opts.steps_per_unit, opts);
  for (const auto& s : samples) {
    PhaseState g = geodesic_flow(spec, PhaseState{xc, iv}, s.t, opts.steps_for(s.t + 0.1), opts);
    const VectorXcd big_u = s.u - (out.lambda + s.t * out.mu) * g.beta;
    out.u_norm_profile.push_back(big_u.norm());
    out.orthogonality_residual =
        std::max(out.orthogonality_residual, std::abs(pair(g.y, g.beta, big_u)));
  }
  return out;
}

}  // namespace hklab
