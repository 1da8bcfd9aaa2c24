#pragma once

// The metric layer over a (pseudo-)Riemannian spec: the canonical 1-form of
// the tangent bundle, its holomorphic extension on twistor fibers, the
// quadratic-pencil 2-form evaluated on normal-bundle sections, extraction of
// the 2-form triple and the metric it induces, the comparison of the
// zeta-linear term with the exterior derivative of the canonical form, and
// the Jacobi-field pairing identity.
//
// At points of the real chart the tangent space of the section family is
// modeled by real global sections of the normal bundle in closed form: the
// linearized gluing at a constant section is Christoffel-free, its sigma-real
// solutions are
//
//   dy(zeta) = A + conj(C0) zeta,
//   dbeta(zeta) = C0 + 2i Im(A) zeta + conj(C0) zeta^2,
//
// a 4n-real-parameter family (A, C0 in C^n).  Everything computed here
// evaluates the fiberwise 2-form on pairs of these sections.

#include "hklab/twistor.hpp"

namespace hklab {

// Theta(a) = g(v, dpi(a)) at (x, v) in TX; `a` is a chart direction (dx, dv)
// and only its base part enters.
double theta(const ManifoldSpec& spec, const TangentPoint& z, const VectorXd& a);

// Holomorphic extension on a twistor fiber: g~_y(beta, dy-part of a).
Complex theta_tilde(const ManifoldSpec& spec, const VectorXcd& y, const VectorXcd& beta,
                    const VectorXcd& dy, const VectorXcd& dbeta);

struct NormalSectionValue {
  VectorXcd dy, dbeta;
};

// The closed-form real normal sections at a constant section over the real
// chart.  Basis order: for j = 0..n-1 the groups A = e_j, A = i e_j,
// C0 = e_j, C0 = i e_j.
class NormalSectionBasis {
 public:
  explicit NormalSectionBasis(int n) : n_(n) {}
  int size() const { return 4 * n_; }
  int dim() const { return n_; }
  NormalSectionValue value(int idx, Complex zeta) const;
  // Residual of the polynomial gluing constraints (the h^0 linear system) on
  // every basis element, and of sigma-reality on a unit-circle grid.
  double gluing_residual(int degree_cap = 6) const;
  double reality_residual() const;

 private:
  int n_;
};

// d(Theta~) at the point (y0, beta0) of a fiber, evaluated on two constant
// variation vectors by jet-seeded directional derivatives.
Complex omega_fiber(const ManifoldSpec& spec, const VectorXcd& y0, const VectorXcd& beta0,
                    const NormalSectionValue& s1, const NormalSectionValue& s2);

struct FormTriple {
  Section base;                     // the constant section the triple sits at
  MatrixXd omega1, omega2, omega3;  // antisymmetric 4n x 4n on the section basis
  MatrixXd metric;                  // G = omega_i(J_i ., .)
  double fit_residual = 0.0;        // quadratic-pencil certificate (4th sample)
  double imag_residual = 0.0;       // imaginary leakage of the extracted forms
  double metric_agreement = 0.0;    // max gap between the three G reconstructions
};

// The 2-form triple and metric at a point of the real chart.  The complex
// structures come from the evaluation isomorphisms of the section family:
// J1 at zeta = 0, J2 at zeta = i, and J3 = -(structure at zeta = 1); this
// assignment is the one under which the three reconstructions of G agree.
FormTriple omega_triple_at_x(const ManifoldSpec& spec, const VectorXd& x);

// Eigenvalue sign counts of G; eigenvalues below floor_scale * max|eig| are
// reported as singular.
std::pair<int, int> signature_at_x(const ManifoldSpec& spec, const VectorXd& x,
                                   double floor_scale = 1e-8);

struct MetricSample {
  VectorXd x, v;   // point of the tube in TX
  VectorXd a1, a2; // two chart directions (dx, dv), each of size 2n
};

// Max over samples of | omega1(s1, s2) - dTheta(a1, a2) | where s_i are the
// point-section variations matching a_i (finite differences of the family)
// and dTheta is a central-difference exterior derivative with Richardson
// refinement.
double lempert_szoke_residual(const ManifoldSpec& spec, std::span<const MetricSample> samples,
                              double section_step = 1e-5, double theta_step = 1e-4,
                              const FlowOptions& opts = {});

// | g~(gamma'(1), u(1)) - g~(gamma'(0), u(0)) - g~(gamma'(0), Du(0)) | along
// gamma(t) = exp^C_x(itv); the seeds are (u(0), covariant Du(0)).
double jacobi_identity_residual(const ManifoldSpec& spec, const VectorXd& x, const VectorXd& v,
                                const VectorXcd& u0, const VectorXcd& u0dot_cov,
                                const FlowOptions& opts = {});

struct JacobiDecomposition {
  Complex lambda{0.0}, mu{0.0};
  std::vector<double> u_norm_profile;     // |U(t)| samples
  double orthogonality_residual = 0.0;    // max |g~(U(t), gamma'(t))|
};

// u(t) = lambda gamma'(t) + t mu gamma'(t) + U(t) with U orthogonal to the
// velocity along the whole geodesic.
JacobiDecomposition decompose_jacobi_field(const ManifoldSpec& spec, const VectorXd& x,
                                           const VectorXd& v, const VectorXcd& u0,
                                           const VectorXcd& u0dot_cov,
                                           std::span<const double> t_grid,
                                           const FlowOptions& opts = {});

}  // namespace hklab
