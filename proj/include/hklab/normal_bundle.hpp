#pragma once

// Normal bundle of a point section, as a concrete two-patch gluing problem.
// At a constant section the linearized transition is Christoffel-free:
//
//   [dy~; dbeta~] = [[I, -1/zeta I], [0, 1/zeta^2 I]] [dy; dbeta],
//
// n copies of the rank-2 extension 0 -> O -> E -> O(2) -> 0, so E should be
// O(1) + O(1).  h^0 of twists certifies the splitting type: global sections
// are polynomial in each patch, and counting them is a rank computation on
// the coefficients of the glued Laurent expansion.

#include <map>

#include "hklab/jet.hpp"

namespace hklab {

// T(zeta) = sum_m terms[m] zeta^m with matrix coefficients.
struct LaurentMatrix {
  int rows = 0, cols = 0;
  std::map<int, MatrixXd> terms;

  MatrixXcd eval(Complex zeta) const;
  // multiply by zeta^k
  LaurentMatrix shifted(int k) const;
};

struct NormalBundleModel {
  int n = 1;       // block count; the bundle has rank 2n
  int twist = 0;   // Chern twist: the model describes E(twist) = E (x) O(twist)
  LaurentMatrix transition;

  // The adapted-structure normal bundle model, twisted.
  static NormalBundleModel adapted(int n, int twist = 0);
};

struct H0Result {
  int dim = 0;
  bool marginal = false;  // the rank decision was close to the tolerance
  double gap = 0.0;       // smallest kept / largest dropped singular value ratio
};

// Dimension of the space of global sections: pairs of vector-valued
// polynomials of degree <= degree_cap in each patch coordinate whose glued
// Laurent expansion matches.  Exact-rank linear solve with the given relative
// tolerance.
H0Result normal_bundle_h0(const NormalBundleModel& model, int degree_cap = 6, double tol = 1e-8);

}  // namespace hklab
