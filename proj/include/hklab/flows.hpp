#pragma once

// Geodesic flow in complex time and everything derived from it: the
// holomorphic exponential map, its differential (through jet-valued states),
// Jacobi fields and parallel transport.
//
// Integration is classical fourth-order Runge-Kutta with a fixed step count
// along the straight segment from 0 to z in complex time.  Fixed steps keep
// reports bit-stable; holomorphy of the flow makes the path choice
// irrelevant, and the invariant suite checks exactly that.

#include <functional>

#include "hklab/jet.hpp"
#include "hklab/manifold.hpp"

namespace hklab {

struct FlowOptions {
  int steps_per_unit = 64;   // steps per unit of |z|
  int min_steps = 32;
  double blowup_norm = 50.0;
  double condition_limit = 1e12;  // singular-differential threshold
  int steps_for(Complex z) const {
    const double len = std::abs(z);
    const int n = static_cast<int>(std::ceil(len * steps_per_unit));
    return std::max(min_steps, n);
  }
};

namespace detail {

// One RK4 pass of d(state)/du = z * rhs(state) for u in [0,1], monitoring the
// chart domain (real box inflated by the tube radius) and the blow-up bound.
// `rhs` fills `ds` given `s`; the first `dim` entries of the state are the
// chart coordinates checked against the domain.
template <class Scalar, class Rhs>
VecX<Scalar> integrate(const ManifoldSpec& spec, VecX<Scalar> state, Complex z, int steps,
                       const FlowOptions& opts, Rhs&& rhs) {
  if (steps < 1) throw StructuralError("integrate: steps must be >= 1");
  const int n = spec.dim();
  const Scalar dz = scalar_from<Scalar>(z / static_cast<double>(steps));
  const Scalar half = scalar_from<Scalar>(Complex(0.5));
  const Scalar sixth = scalar_from<Scalar>(Complex(1.0 / 6.0));
  const Scalar two = scalar_from<Scalar>(Complex(2.0));
  VecX<Scalar> k1(state.size()), k2(state.size()), k3(state.size()), k4(state.size());
  VecX<Scalar> tmp(state.size());

  auto check = [&](const VecX<Scalar>& s, int step) {
    const double done = static_cast<double>(step) / steps;
    for (int i = 0; i < s.size(); ++i) {
      if (!(leading_abs(s(i)) < opts.blowup_norm))
        throw BlowUpError("flow: state exceeded blow-up bound", done);
    }
    for (int i = 0; i < n; ++i) {
      if (leading_im_abs(s(i)) > spec.tube_radius())
        throw DomainExitError("flow: left the tube around the real chart", done);
      const double re = leading_re(s(i));
      const double margin = spec.tube_radius();
      if (re < spec.chart_domain().lo(i) - margin || re > spec.chart_domain().hi(i) + margin)
        throw DomainExitError("flow: left the chart box", done);
    }
  };

  check(state, 0);
  for (int step = 0; step < steps; ++step) {
    rhs(state, k1);
    tmp = state + half * dz * k1;
    rhs(tmp, k2);
    tmp = state + half * dz * k2;
    rhs(tmp, k3);
    tmp = state + dz * k3;
    rhs(tmp, k4);
    state += sixth * dz * (k1 + two * k2 + two * k3 + k4);
    check(state, step + 1);
  }
  return state;
}

// Geodesic right-hand side on the packed state (y_0..y_{n-1}, beta_0..beta_{n-1}).
template <class Scalar>
void geodesic_rhs(const ManifoldSpec& spec, const VecX<Scalar>& s, VecX<Scalar>& ds) {
  const int n = spec.dim();
  std::span<const Scalar> y(s.data(), n);
  std::span<const Scalar> beta(s.data() + n, n);
  for (int i = 0; i < n; ++i) ds(i) = beta[i];
  std::span<Scalar> acc(ds.data() + n, n);
  spec.acceleration<Scalar>(y, beta, acc);
}

template <class Scalar>
VecX<Scalar> flow_phase(const ManifoldSpec& spec, VecX<Scalar> state, Complex z, int steps,
                        const FlowOptions& opts) {
  return integrate<Scalar>(spec, std::move(state), z, steps, opts,
                           [&spec](const VecX<Scalar>& s, VecX<Scalar>& ds) {
                             geodesic_rhs<Scalar>(spec, s, ds);
                           });
}

}  // namespace detail

// State advanced along the geodesic flow for complex time z.
PhaseState geodesic_flow(const ManifoldSpec& spec, const PhaseState& s, Complex z, int steps,
                         const FlowOptions& opts = {});

// exp^C_y(z v): base point of the flow from (y, v).
VectorXcd exp_c(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& v, Complex z,
                int steps, const FlowOptions& opts = {});

// Differential of (y, v) -> geodesic_flow((y, v), z) as a 2n x 2n complex
// matrix, computed by running the flow on first-order jets in 2n seed
// variables.  Rows are (y_out, beta_out), columns (y_in, v_in).
MatrixXcd exp_c_differential(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& v,
                             Complex z, int steps, const FlowOptions& opts = {});

struct JacobiSample {
  double t = 0.0;
  VectorXcd u;     // variation of the base point
  VectorXcd udot;  // plain time derivative of u (variation of the velocity)
};

// Jacobi field along t -> exp^C_y(t v) through a jet-seeded variation of the
// initial data (u0, u0dot).  t_grid must be increasing and start at >= 0.
std::vector<JacobiSample> jacobi_field(const ManifoldSpec& spec, const VectorXcd& y,
                                       const VectorXcd& v, const VectorXcd& u0,
                                       const VectorXcd& u0dot, std::span<const double> t_grid,
                                       int steps_per_unit = 64, const FlowOptions& opts = {});

// w0 transported along the geodesic from (y, v) for complex time z, solving
// w'^k + Gamma^k_ij velocity^i w^j = 0 together with the geodesic itself.
VectorXcd parallel_transport(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& v,
                             Complex z, const VectorXcd& w0, int steps,
                             const FlowOptions& opts = {});

}  // namespace hklab
