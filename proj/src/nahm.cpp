#include "hklab/nahm.hpp"

#include "hklab/jet_calculus.hpp"

namespace hklab {

namespace {

const Complex kI(0.0, 1.0);

void require_same_frame(const JetVectorField& a, const JetVectorField& b) {
  if (a.dim() != b.dim() || (a.center - b.center).norm() != 0.0 || a.order() != b.order())
    throw StructuralError("jet vector fields must share center, dimension and order");
}

Jet conj_jet(const Jet& a) {
  Jet r = a;
  for (int i = 0; i < r.size(); ++i) r.coeff_ref(i) = std::conj(r.coeff(i));
  return r;
}

}  // namespace

VectorXcd JetVectorField::value_at(const VectorXcd& p) const {
  VectorXcd out(dim());
  const VectorXcd h = p - center;
  for (int k = 0; k < dim(); ++k) out(k) = evaluate(comps[k], h);
  return out;
}

double JetVectorField::max_abs_coeff() const {
  double m = 0.0;
  for (const Jet& c : comps) m = std::max(m, c.max_abs_coeff());
  return m;
}

JetVectorField tau_star_field(const JetVectorField& v) {
  if (v.center.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("tau_star_field: center must lie on the real chart");
  JetVectorField out;
  out.center = v.center;
  out.comps.reserve(v.dim());
  for (const Jet& c : v.comps) out.comps.push_back(conj_jet(c));
  return out;
}

JetVectorField bracket(const JetVectorField& v, const JetVectorField& w) {
  require_same_frame(v, w);
  const int n = v.dim();
  JetVectorField out;
  out.center = v.center;
  out.comps.reserve(n);
  for (int k = 0; k < n; ++k) {
    Jet acc = Jet::constant(v.comps[k].layout(), 0.0);
    for (int j = 0; j < n; ++j) {
      acc += v.comps[j] * derivative(w.comps[k], j);
      acc -= w.comps[j] * derivative(v.comps[k], j);
    }
    out.comps.push_back(std::move(acc));
  }
  return out;
}

JetVectorField field_sum(const JetVectorField& a, Complex ca, const JetVectorField& b,
                         Complex cb) {
  require_same_frame(a, b);
  JetVectorField out;
  out.center = a.center;
  out.comps.reserve(a.dim());
  for (int k = 0; k < a.dim(); ++k) out.comps.push_back(Jet(ca) * a.comps[k] + Jet(cb) * b.comps[k]);
  return out;
}

JetVectorField field_scale(Complex c, const JetVectorField& a) {
  JetVectorField out;
  out.center = a.center;
  out.comps.reserve(a.dim());
  for (int k = 0; k < a.dim(); ++k) out.comps.push_back(Jet(c) * a.comps[k]);
  return out;
}

JetVectorField parallel_field(const ManifoldSpec& spec, const VectorXd& x, const VectorXcd& v,
                              const NahmOptions& opts) {
  const double curv = spec.curvature_residual(x);
  if (curv > kFlatnessGate)
    throw CurvatureError("parallel_field: connection is not flat", curv);

  const int n = spec.dim();
  auto L = JetLayout::get(n, opts.order);

  // exp_x(h) - x as a jet system in the seed h
  VecX<Jet> st(2 * n);
  for (int k = 0; k < n; ++k) {
    st(k) = Jet::constant(L, x(k));
    st(n + k) = Jet::variable(L, 0.0, k);
  }
  st = detail::flow_phase<Jet>(spec, std::move(st), 1.0, opts.steps, opts.flow);
  std::vector<Jet> exp_jet;
  exp_jet.reserve(n);
  for (int k = 0; k < n; ++k) exp_jet.push_back(st(k) - Jet(Complex(x(k))));

  // radial initial velocity U(h) with exp_x(U(h)) = x + h
  std::vector<Jet> radial = invert(exp_jet);

  // transport v along s -> exp_x(s U(h)) for s in [0,1]
  VecX<Jet> tr(3 * n);
  for (int k = 0; k < n; ++k) {
    tr(k) = Jet::constant(L, x(k));
    tr(n + k) = radial[k];
    tr(2 * n + k) = Jet::constant(L, v(k));
  }
  auto rhs = [&spec, n](const VecX<Jet>& s, VecX<Jet>& ds) {
    std::span<const Jet> y(s.data(), n), beta(s.data() + n, n), w(s.data() + 2 * n, n);
    for (int i = 0; i < n; ++i) ds(i) = beta[i];
    spec.acceleration<Jet>(y, beta, std::span<Jet>(ds.data() + n, n));
    spec.transport_derivative<Jet>(y, beta, w, std::span<Jet>(ds.data() + 2 * n, n));
  };
  tr = detail::integrate<Jet>(spec, std::move(tr), 1.0, opts.steps, opts.flow, rhs);

  JetVectorField out;
  out.center = x.cast<Complex>();
  out.comps.reserve(n);
  for (int k = 0; k < n; ++k) out.comps.push_back(tr(2 * n + k));
  return out;
}

VectorXcd field_flow(const JetVectorField& v, Complex time, const VectorXcd& p,
                     const NahmOptions& opts) {
  if (time == Complex(0.0)) return p;
  const int n = v.dim();
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(time) * opts.steps)));
  const Complex dz = time / static_cast<double>(steps);
  VectorXcd r = p;
  auto check = [&](const VectorXcd& q) {
    if ((q - v.center).cwiseAbs().maxCoeff() > opts.trust_radius)
      throw TrustRadiusError("field_flow: point left the trust radius of the expansion");
  };
  check(r);
  VectorXcd k1(n), k2(n), k3(n), k4(n);
  for (int s = 0; s < steps; ++s) {
    k1 = v.value_at(r);
    k2 = v.value_at(r + 0.5 * dz * k1);
    k3 = v.value_at(r + 0.5 * dz * k2);
    k4 = v.value_at(r + dz * k3);
    r += dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check(r);
  }
  return r;
}

double verify_flat_identity(const ManifoldSpec& spec, const VectorXd& x, const VectorXcd& p,
                            const VectorXcd& v, const NahmOptions& opts) {
  JetVectorField vhat = parallel_field(spec, x, v, opts);
  const VectorXcd vp = vhat.value_at(p);
  VectorXcd lhs = exp_c(spec, p, vp, 1.0, opts.steps, opts.flow);
  VectorXcd rhs = field_flow(vhat, 1.0, p, opts);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double NahmState::reality_residual() const {
  const JetVectorField tb0 = tau_star_field(b0);
  const JetVectorField tb1 = tau_star_field(b1);
  double r = 0.0;
  for (int k = 0; k < b0.dim(); ++k) {
    r = std::max(r, max_coeff_distance(tb0.comps[k], b2.comps[k]));
    r = std::max(r, max_coeff_distance(tb1.comps[k], -b1.comps[k]));
  }
  return r;
}

NahmState nahm_initial(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v1,
                       const VectorXd& v2, const VectorXd& v3, const NahmOptions& opts) {
  NahmState s;
  s.t = 0.0;
  s.b0 = parallel_field(spec, x, v2.cast<Complex>() + kI * v3.cast<Complex>(), opts);
  s.b1 = parallel_field(spec, x, 2.0 * kI * v1.cast<Complex>(), opts);
  s.b2 = parallel_field(spec, x, v2.cast<Complex>() - kI * v3.cast<Complex>(), opts);
  return s;
}

namespace {

struct NahmTriple {
  JetVectorField b0, b1, b2;

  NahmTriple axpy(double c, const NahmTriple& d) const {
    return {field_sum(b0, 1.0, d.b0, c), field_sum(b1, 1.0, d.b1, c),
            field_sum(b2, 1.0, d.b2, c)};
  }
};

// Lax form of the Nahm system: the pencil P = B0/zeta + B1 + B2 zeta has to
// satisfy P' = [-B1/2 - B0/zeta, P] for the frame factorization to close,
// which fixes the bracket coefficients.  In the selfdual variables
// B0 = T2 + iT3, B1 = 2iT1, B2 = T2 - iT3 this is T1' = [T2,T3] and cyclic.
NahmTriple nahm_rhs(const NahmTriple& s) {
  return {field_scale(-0.5, bracket(s.b0, s.b1)), field_scale(-1.0, bracket(s.b0, s.b2)),
          field_scale(-0.5, bracket(s.b1, s.b2))};
}

}  // namespace

std::vector<NahmState> nahm_solve(const NahmState& initial, const NahmOptions& opts) {
  if (initial.b0.order() < 2)
    throw StructuralError("nahm_solve: order must be at least 2");
  const int steps = opts.steps;
  const double h = 1.0 / steps;
  std::vector<NahmState> out;
  out.reserve(steps + 1);
  out.push_back(initial);
  NahmTriple s{initial.b0, initial.b1, initial.b2};
  for (int i = 0; i < steps; ++i) {
    const NahmTriple k1 = nahm_rhs(s);
    const NahmTriple k2 = nahm_rhs(s.axpy(h / 2, k1));
    const NahmTriple k3 = nahm_rhs(s.axpy(h / 2, k2));
    const NahmTriple k4 = nahm_rhs(s.axpy(h, k3));
    s = s.axpy(h / 6, k1).axpy(h / 3, k2).axpy(h / 3, k3).axpy(h / 6, k4);
    const double norm = std::max({s.b0.max_abs_coeff(), s.b1.max_abs_coeff(),
                                  s.b2.max_abs_coeff()});
    if (!(norm < opts.blowup))
      throw BlowUpError("nahm_solve: coefficient blow-up", static_cast<double>(i + 1) / steps);
    out.push_back(NahmState{(i + 1) * h, s.b0, s.b1, s.b2});
  }
  return out;
}

FrameFlow frame_integrate(std::shared_ptr<const std::vector<NahmState>> states, Complex zeta) {
  if (!states || states->empty()) throw StructuralError("frame_integrate: empty Nahm flow");
  const double az = std::abs(zeta);
  if (!(az >= 0.5 && az <= 2.0))
    throw DomainError("frame_integrate: zeta outside the factorization annulus");
  return FrameFlow{std::move(states), zeta};
}

namespace {

int grid_index(const std::vector<NahmState>& states, double t) {
  const int steps = static_cast<int>(states.size()) - 1;
  const double pos = t * steps;
  const int idx = static_cast<int>(std::lround(pos));
  if (idx < 0 || idx > steps || std::abs(pos - idx) > 1e-9)
    throw StructuralError("frame flow: t must be a point of the Nahm grid");
  return idx;
}

// Integrate the point p along the time-dependent field A(t) from t = t0 down
// to 0 in reversed time, carrying the Nahm triple along so every RK4 stage
// sees exact field values.  sign_b1/zeta_coeff pick the plus or minus frame.
VectorXcd frame_apply(const std::vector<NahmState>& states, double t0, const VectorXcd& p,
                      double b1_coeff, Complex zeta_coeff, bool use_b2,
                      const NahmOptions& opts) {
  const int idx = grid_index(states, t0);
  if (idx == 0) return p;
  const double h = t0 / idx;

  NahmTriple b{states[idx].b0, states[idx].b1, states[idx].b2};
  VectorXcd r = p;
  const VectorXcd& center = b.b0.center;
  auto field_at = [&](const NahmTriple& s, const VectorXcd& q) {
    const JetVectorField& pencil = use_b2 ? s.b2 : s.b0;
    JetVectorField a = field_sum(s.b1, b1_coeff, pencil, zeta_coeff);
    return a.value_at(q);
  };
  auto check = [&](const VectorXcd& q) {
    if ((q - center).cwiseAbs().maxCoeff() > opts.trust_radius)
      throw TrustRadiusError("frame flow: point left the trust radius");
  };
  check(r);
  for (int i = 0; i < idx; ++i) {
    // reversed time: dB/ds = -nahm_rhs, dr/ds = A(B)(r)
    const NahmTriple bk1 = nahm_rhs(b);
    const VectorXcd rk1 = field_at(b, r);

    const NahmTriple b2s = b.axpy(-h / 2, bk1);
    const NahmTriple bk2 = nahm_rhs(b2s);
    const VectorXcd rk2 = field_at(b2s, r + (h / 2) * rk1);

    const NahmTriple b3s = b.axpy(-h / 2, bk2);
    const NahmTriple bk3 = nahm_rhs(b3s);
    const VectorXcd rk3 = field_at(b3s, r + (h / 2) * rk2);

    const NahmTriple b4s = b.axpy(-h, bk3);
    const NahmTriple bk4 = nahm_rhs(b4s);
    const VectorXcd rk4 = field_at(b4s, r + h * rk3);

    b = b.axpy(-h / 6, bk1).axpy(-h / 3, bk2).axpy(-h / 3, bk3).axpy(-h / 6, bk4);
    r += (h / 6) * (rk1 + 2.0 * rk2 + 2.0 * rk3 + rk4);
    check(r);
  }
  return r;
}

}  // namespace

VectorXcd FrameFlow::apply_plus(double t, const VectorXcd& p, const NahmOptions& opts) const {
  // g+^{-1} g+' = B1/2 + zeta B2
  return frame_apply(*states, t, p, 0.5, zeta, /*use_b2=*/true, opts);
}

VectorXcd FrameFlow::apply_minus(double t, const VectorXcd& p, const NahmOptions& opts) const {
  // g-^{-1} g-' = -B1/2 - zeta~ B0
  return frame_apply(*states, t, p, -0.5, -1.0 / zeta, /*use_b2=*/false, opts);
}

double riemann_hilbert_residual(const NahmState& initial,
                                std::shared_ptr<const std::vector<NahmState>> states,
                                const VectorXd& x, Complex zeta, double t,
                                const NahmOptions& opts) {
  FrameFlow frame = frame_integrate(states, zeta);
  const VectorXcd xc = x.cast<Complex>();
  // beta(zeta) = B0(0) + zeta B1(0) + zeta^2 B2(0)
  JetVectorField beta = field_sum(field_sum(initial.b0, 1.0, initial.b1, zeta), 1.0, initial.b2,
                                  zeta * zeta);
  const VectorXcd plus = frame.apply_plus(t, xc, opts);
  const VectorXcd lhs = field_flow(beta, -t / zeta, plus, opts);
  const VectorXcd rhs = frame.apply_minus(t, xc, opts);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

Section nahm_section(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v1,
                     const VectorXd& v2, const VectorXd& v3, const NahmOptions& opts) {
  NahmState initial = nahm_initial(spec, x, v1, v2, v3, opts);
  auto states = std::make_shared<const std::vector<NahmState>>(nahm_solve(initial, opts));
  auto init = std::make_shared<const NahmState>(std::move(initial));
  const VectorXcd xc = x.cast<Complex>();

  Section s;
  s.kind = Section::Kind::NahmSection;
  // The frame ODEs themselves are fine on the whole disc |zeta| <= 2, so the
  // evaluators go through the joint integrator directly; the factorization
  // annulus only constrains the Riemann-Hilbert statement.
  s.eval_zero = [states, init, xc, opts](Complex zeta) {
    const VectorXcd y = frame_apply(*states, 1.0, xc, 0.5, zeta, /*use_b2=*/true, opts);
    JetVectorField beta = field_sum(field_sum(init->b0, 1.0, init->b1, zeta), 1.0, init->b2,
                                    zeta * zeta);
    return TwistorPoint{Patch::Zero, y, beta.value_at(y), zeta};
  };
  s.eval_inf = [states, init, xc, opts](Complex zeta_inf) {
    const VectorXcd y = frame_apply(*states, 1.0, xc, -0.5, -zeta_inf, /*use_b2=*/false, opts);
    JetVectorField beta = field_sum(field_sum(init->b2, 1.0, init->b1, zeta_inf), 1.0, init->b0,
                                    zeta_inf * zeta_inf);
    return TwistorPoint{Patch::Infinity, y, beta.value_at(y), zeta_inf};
  };
  return s;
}

}  // namespace hklab
