#include "hklab/flows.hpp"

#include <array>

#include <Eigen/SVD>

namespace hklab {

PhaseState geodesic_flow(const ManifoldSpec& spec, const PhaseState& s, Complex z, int steps,
                         const FlowOptions& opts) {
  const int n = spec.dim();
  if (s.y.size() != n || s.beta.size() != n)
    throw StructuralError("geodesic_flow: state size mismatch");
  if (z == Complex(0.0)) return s;
  VecX<Complex> state(2 * n);
  state << s.y, s.beta;
  state = detail::flow_phase<Complex>(spec, std::move(state), z, steps, opts);
  return PhaseState{state.head(n), state.tail(n)};
}

VectorXcd exp_c(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& v, Complex z,
                int steps, const FlowOptions& opts) {
  return geodesic_flow(spec, PhaseState{y, v}, z, steps, opts).y;
}

MatrixXcd exp_c_differential(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& v,
                             Complex z, int steps, const FlowOptions& opts) {
  const int n = spec.dim();
  auto L = JetLayout::get(2 * n, 1);
  VecX<Jet> state(2 * n);
  for (int k = 0; k < n; ++k) {
    state(k) = Jet::variable(L, y(k), k);
    state(n + k) = Jet::variable(L, v(k), n + k);
  }
  if (z != Complex(0.0)) state = detail::flow_phase<Jet>(spec, std::move(state), z, steps, opts);
  MatrixXcd d(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) d(r, c) = state(r).coeff_linear(c);
  Eigen::JacobiSVD<MatrixXcd> svd(d);
  const double smin = svd.singularValues()(2 * n - 1);
  const double cond = smin > 0 ? svd.singularValues()(0) / smin
                               : std::numeric_limits<double>::infinity();
  if (!(cond < opts.condition_limit))
    throw SingularityError("exp_c_differential: singular flow differential", cond);
  return d;
}

std::vector<JacobiSample> jacobi_field(const ManifoldSpec& spec, const VectorXcd& y,
                                       const VectorXcd& v, const VectorXcd& u0,
                                       const VectorXcd& u0dot, std::span<const double> t_grid,
                                       int steps_per_unit, const FlowOptions& opts) {
  const int n = spec.dim();
  auto L = JetLayout::get(1, 1);
  VecX<Jet> state(2 * n);
  for (int k = 0; k < n; ++k) {
    const std::array<Complex, 1> gu{u0(k)};
    const std::array<Complex, 1> gv{u0dot(k)};
    state(k) = Jet::linear(L, y(k), gu);
    state(n + k) = Jet::linear(L, v(k), gv);
  }
  std::vector<JacobiSample> samples;
  samples.reserve(t_grid.size());
  double t_prev = 0.0;
  auto emit = [&](double t) {
    JacobiSample s;
    s.t = t;
    s.u.resize(n);
    s.udot.resize(n);
    for (int k = 0; k < n; ++k) {
      s.u(k) = state(k).coeff_linear(0);
      s.udot(k) = state(n + k).coeff_linear(0);
    }
    samples.push_back(std::move(s));
  };
  for (double t : t_grid) {
    if (t < t_prev) throw StructuralError("jacobi_field: t_grid must be nondecreasing");
    const double dt = t - t_prev;
    if (dt > 0) {
      const int steps = std::max(opts.min_steps, static_cast<int>(std::ceil(dt * steps_per_unit)));
      state = detail::flow_phase<Jet>(spec, std::move(state), Complex(dt), steps, opts);
    }
    t_prev = t;
    emit(t);
  }
  return samples;
}

VectorXcd parallel_transport(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& v,
                             Complex z, const VectorXcd& w0, int steps, const FlowOptions& opts) {
  const int n = spec.dim();
  if (z == Complex(0.0)) return w0;
  VecX<Complex> state(3 * n);
  state << y, v, w0;
  auto rhs = [&spec, n](const VecX<Complex>& s, VecX<Complex>& ds) {
    std::span<const Complex> yy(s.data(), n);
    std::span<const Complex> beta(s.data() + n, n);
    std::span<const Complex> w(s.data() + 2 * n, n);
    for (int i = 0; i < n; ++i) ds(i) = beta[i];
    spec.acceleration<Complex>(yy, beta, std::span<Complex>(ds.data() + n, n));
    spec.transport_derivative<Complex>(yy, beta, w, std::span<Complex>(ds.data() + 2 * n, n));
  };
  state = detail::integrate<Complex>(spec, std::move(state), z, steps, opts, rhs);
  return state.tail(n);
}

}  // namespace hklab
