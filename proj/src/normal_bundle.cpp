#include "hklab/normal_bundle.hpp"

#include <Eigen/SVD>

namespace hklab {

MatrixXcd LaurentMatrix::eval(Complex zeta) const {
  MatrixXcd out = MatrixXcd::Zero(rows, cols);
  for (const auto& [m, coeff] : terms) out += std::pow(zeta, m) * coeff;
  return out;
}

LaurentMatrix LaurentMatrix::shifted(int k) const {
  LaurentMatrix out{rows, cols, {}};
  for (const auto& [m, coeff] : terms) out.terms.emplace(m + k, coeff);
  return out;
}

NormalBundleModel NormalBundleModel::adapted(int n, int twist) {
  LaurentMatrix t;
  t.rows = t.cols = 2 * n;
  MatrixXd top_left = MatrixXd::Zero(2 * n, 2 * n);
  top_left.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
  MatrixXd top_right = MatrixXd::Zero(2 * n, 2 * n);
  top_right.topRightCorner(n, n) = -MatrixXd::Identity(n, n);
  MatrixXd bottom = MatrixXd::Zero(2 * n, 2 * n);
  bottom.bottomRightCorner(n, n) = MatrixXd::Identity(n, n);
  t.terms[0] = top_left;
  t.terms[-1] = top_right;
  t.terms[-2] = bottom;
  // Tensoring with O(k) multiplies the transition by zeta^{-k} in this
  // orientation (sections of O(d) are the polynomials of degree <= d).
  NormalBundleModel model{n, twist, t.shifted(-twist)};
  return model;
}

H0Result normal_bundle_h0(const NormalBundleModel& model, int degree_cap, double tol) {
  const int rank_bundle = model.transition.cols;
  if (model.transition.rows != rank_bundle)
    throw StructuralError("normal bundle: transition must be square");
  // the gluing only makes sense for transitions invertible on the annulus
  for (const Complex zeta : {Complex(1.0), Complex(0.0, 1.0), Complex(-0.8, 0.4)}) {
    Eigen::JacobiSVD<MatrixXcd> svd(model.transition.eval(zeta));
    if (!(svd.singularValues()(rank_bundle - 1) > 1e-10))
      throw StructuralError("normal bundle: transition is singular on the overlap annulus");
  }
  const int D = degree_cap;
  const int unknowns = rank_bundle * (D + 1);

  // Coefficient of zeta^e in T(zeta) P(zeta), with P the stacked polynomial:
  // rows indexed by (component, e).  A global section requires the glued
  // expansion to be polynomial in 1/zeta of degree <= D: every exponent
  // e > 0 or e < -D must vanish.
  int min_exp = 0, max_exp = 0;
  for (const auto& [m, coeff] : model.transition.terms) {
    min_exp = std::min(min_exp, m);
    max_exp = std::max(max_exp, m + D);
  }
  std::vector<int> forbidden;
  for (int e = min_exp; e <= max_exp; ++e) {
    if (e > 0 || e < -D) forbidden.push_back(e);
  }

  MatrixXd constraints = MatrixXd::Zero(static_cast<int>(forbidden.size()) * rank_bundle, unknowns);
  for (std::size_t fi = 0; fi < forbidden.size(); ++fi) {
    const int e = forbidden[fi];
    for (const auto& [m, coeff] : model.transition.terms) {
      const int j = e - m;  // polynomial degree that lands on exponent e
      if (j < 0 || j > D) continue;
      for (int r = 0; r < rank_bundle; ++r) {
        for (int c = 0; c < rank_bundle; ++c) {
          if (coeff(r, c) != 0.0)
            constraints(static_cast<int>(fi) * rank_bundle + r, c * (D + 1) + j) += coeff(r, c);
        }
      }
    }
  }

  Eigen::JacobiSVD<MatrixXd> svd(constraints);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = tol * std::max(smax, 1.0);
  int rank = 0;
  double largest_dropped = 0.0, smallest_kept = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      ++rank;
      smallest_kept = std::min(smallest_kept, sv(i));
    } else {
      largest_dropped = std::max(largest_dropped, sv(i));
    }
  }
  H0Result out;
  out.dim = unknowns - rank;
  out.gap = largest_dropped > 0.0 ? smallest_kept / largest_dropped
                                  : std::numeric_limits<double>::infinity();
  out.marginal = out.gap < 1e3;
  return out;
}

}  // namespace hklab
