#pragma once

// The polar-decomposition construction of the adapted complex structure: TX
// embeds into the complexified chart through exp^C restricted to the -1
// eigenbundle of the conjugation (the (x, v) -> iv identification), and the
// chart's multiplication by i pulls back to an almost complex structure J on
// (a tube in) TX.  The leaves T_gamma gamma of the canonical foliation come
// out J-holomorphic; the residual checks below quantify exactly that.

#include "hklab/flows.hpp"

namespace hklab {

struct AlmostComplexValue {
  TangentPoint base;
  MatrixXd J;  // 2n x 2n acting on (dx, dv)
};

// tau_* on (1,0)-vectors at points of the real chart: componentwise
// conjugation.
VectorXcd tau_star(const VectorXcd& w);

// Phi(x, v) = exp^C_x(iv), the embedding of the tube in TX into the
// complexified chart.
VectorXcd embed_v_minus(const ManifoldSpec& spec, const TangentPoint& p,
                        const FlowOptions& opts = {});

// J = (dPhi)^{-1} . i . dPhi at p, with dPhi assembled from the jet-seeded
// flow differential.  Throws SingularityError with the condition number when
// p is too close to a conjugate point.
AlmostComplexValue adapted_j(const ManifoldSpec& spec, const TangentPoint& p,
                             const FlowOptions& opts = {});

// Max Cauchy-Riemann defect |J dF - dF i| of the leaf parametrization
// F(p, q) = (gamma(p), q gamma'(p)) over the given grid, for the geodesic
// gamma through (x, v).
double leaf_holomorphicity_residual(const ManifoldSpec& spec, const VectorXd& x,
                                    const VectorXd& v, std::span<const double> p_grid,
                                    std::span<const double> q_grid,
                                    const FlowOptions& opts = {});

// Nijenhuis tensor of the adapted J field at p, evaluated on coordinate
// vector fields by central finite differences with Richardson refinement.
double nijenhuis_residual(const ManifoldSpec& spec, const TangentPoint& p, double fd_step = 1e-4,
                          const FlowOptions& opts = {});

}  // namespace hklab
