#pragma once

// Flat connections: parallel vector fields as truncated Taylor expansions,
// flows of such fields, the exp-equals-flow identity, the Nahm system in the
// Lie algebra of jet vector fields, frame integration, and the resulting
// twistor sections.
//
// Everything here requires zero curvature; the operations gate on a
// finite-difference curvature check and refuse curved specs.

#include "hklab/twistor.hpp"

namespace hklab {

// Taylor expansion of a holomorphic vector field at a center point.  The
// component jets are series in the displacement from the center; values are
// trusted inside |p - center|_inf <= trust radius.
struct JetVectorField {
  VectorXcd center;
  std::vector<Jet> comps;  // n jets in n variables

  int dim() const { return static_cast<int>(comps.size()); }
  int order() const { return comps.empty() ? 0 : comps[0].order(); }
  VectorXcd value_at(const VectorXcd& p) const;
  double max_abs_coeff() const;
};

// tau_* pushforward: conj of all coefficients.  Requires a real center.
JetVectorField tau_star_field(const JetVectorField& v);

// [V, W]^k = sum_j V^j d_j W^k - W^j d_j V^k, truncated at the storage
// order; coefficients of total degree <= order-1 are exact.
JetVectorField bracket(const JetVectorField& v, const JetVectorField& w);

JetVectorField field_sum(const JetVectorField& a, Complex ca, const JetVectorField& b, Complex cb);
JetVectorField field_scale(Complex c, const JetVectorField& a);

struct NahmOptions {
  int order = 6;          // jet truncation order
  int steps = 64;         // Nahm/frame/field RK4 steps per unit time
  double trust_radius = 0.5;
  double blowup = 1e3;    // coefficient blow-up bound for the Nahm flow
  FlowOptions flow;       // geodesic integrations (hat fields, gate checks)
};

inline constexpr double kFlatnessGate = 1e-8;

// Taylor expansion at x (to opts.order) of the field obtained by translating
// v parallelwise along radial geodesics.  With zero curvature this is
// parallel translation along arbitrary curves; the operation refuses specs
// that fail the curvature gate.
JetVectorField parallel_field(const ManifoldSpec& spec, const VectorXd& x, const VectorXcd& v,
                              const NahmOptions& opts = {});

// e^{time V}(p): integral curve of the field, complex time allowed.
VectorXcd field_flow(const JetVectorField& v, Complex time, const VectorXcd& p,
                     const NahmOptions& opts = {});

// | exp^C_p(v_hat|_p) - e^{v_hat}(p) | for the parallel field of v built at
// x; the two evaluation routes check each other.
double verify_flat_identity(const ManifoldSpec& spec, const VectorXd& x, const VectorXcd& p,
                            const VectorXcd& v, const NahmOptions& opts = {});

struct NahmState {
  double t = 0.0;
  JetVectorField b0, b1, b2;

  // max | tau(B0) - B2 |, | tau(B1) + B1 | over coefficients
  double reality_residual() const;
};

// Initial data B0 = hat(V2 + i V3), B1 = 2i hat(V1), B2 = hat(V2 - i V3).
NahmState nahm_initial(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v1,
                       const VectorXd& v2, const VectorXd& v3, const NahmOptions& opts = {});

// Fourth-order integration of the Nahm system in its Lax-compatible form
//   B0' = -[B0,B1]/2,  B1' = -[B0,B2],  B2' = -[B1,B2]/2
// (T1' = [T2,T3] and cyclic in selfdual variables) over [0,1] on a uniform
// grid with opts.steps steps; returns steps+1 states.  These coefficients
// are forced by the frame equations: the quadratic pencil must move by the
// Lax bracket with the minus frame generator or the factorization does not
// glue, which the Riemann-Hilbert residual check verifies directly.
std::vector<NahmState> nahm_solve(const NahmState& initial, const NahmOptions& opts = {});

// The frame flows g+(t, zeta), g-(t, zeta~) solving
//   g+^{-1} g+' = B1/2 + zeta B2,   g-^{-1} g-' = -B1/2 - zeta~ B0
// from the identity, realized as point maps.  The Nahm states are integrated
// jointly with the point in reversed time, so no interpolation of the
// B-fields is involved.
struct FrameFlow {
  std::shared_ptr<const std::vector<NahmState>> states;
  Complex zeta;  // patch-zero coordinate; the minus flow uses 1/zeta

  // g+(t, zeta) applied to p; t must be a grid point.
  VectorXcd apply_plus(double t, const VectorXcd& p, const NahmOptions& opts = {}) const;
  // g-(t, 1/zeta) applied to p.
  VectorXcd apply_minus(double t, const VectorXcd& p, const NahmOptions& opts = {}) const;
};

FrameFlow frame_integrate(std::shared_ptr<const std::vector<NahmState>> states, Complex zeta);

// | e^{-t beta(zeta)/zeta} g+(t,zeta) x  -  g-(t, 1/zeta) x | at the given
// grid time, with beta(zeta) the parallel field of the quadratic pencil.
double riemann_hilbert_residual(const NahmState& initial,
                                std::shared_ptr<const std::vector<NahmState>> states,
                                const VectorXd& x, Complex zeta, double t,
                                const NahmOptions& opts = {});

// The full real section attached to (x, V1, V2, V3): over zeta the point
// (beta(zeta)|_y, y = g+(1,zeta) x, zeta), mirrored on the other patch.
Section nahm_section(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v1,
                     const VectorXd& v2, const VectorXd& v3, const NahmOptions& opts = {});

}  // namespace hklab
