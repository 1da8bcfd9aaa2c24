#pragma once

// Chart-level description of a real-analytic manifold with a linear
// connection: Christoffel symbols as expression trees in the chart
// coordinates, an optional (possibly indefinite) metric, and the box where
// the real locus lives.  Complexification is implicit: evaluating the same
// expressions at complex points is the holomorphic extension, and
// coordinatewise conjugation is the antiholomorphic involution fixing the
// real chart.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hklab/expr.hpp"

namespace hklab {

struct ChartDomain {
  VectorXd lo, hi;
};

class ManifoldSpec {
 public:
  ManifoldSpec(int dim, std::vector<Expr> christoffel, std::optional<std::vector<Expr>> metric,
               std::optional<std::pair<int, int>> signature, ChartDomain chart_domain,
               double tube_radius = 0.5);

  int dim() const { return dim_; }
  bool has_metric() const { return metric_.has_value(); }
  const std::optional<std::pair<int, int>>& signature() const { return signature_; }
  const ChartDomain& chart_domain() const { return chart_domain_; }
  double tube_radius() const { return tube_radius_; }

  // Gamma^k_{ij}; k is the upper index.
  const Expr& gamma(int k, int i, int j) const { return christoffel_[(k * dim_ + i) * dim_ + j]; }
  const Expr& metric_entry(int i, int j) const;

  // Indices (k, i, j) of the Christoffel entries that are not literal zero.
  const std::vector<std::array<int, 3>>& gamma_support() const { return gamma_support_; }

  // -sum Gamma^k_ij beta_i beta_j, the geodesic acceleration at y.
  template <class Scalar>
  void acceleration(std::span<const Scalar> y, std::span<const Scalar> beta,
                    std::span<Scalar> out) const {
    for (int k = 0; k < dim_; ++k) out[k] = Scalar(0.0);
    for (const auto& [k, i, j] : gamma_support_) {
      out[k] -= gamma(k, i, j).template eval<Scalar>(y) * beta[i] * beta[j];
    }
  }

  // -sum Gamma^k_ij velocity_i w_j, the parallel-transport derivative.
  template <class Scalar>
  void transport_derivative(std::span<const Scalar> y, std::span<const Scalar> velocity,
                            std::span<const Scalar> w, std::span<Scalar> out) const {
    for (int k = 0; k < dim_; ++k) out[k] = Scalar(0.0);
    for (const auto& [k, i, j] : gamma_support_) {
      out[k] -= gamma(k, i, j).template eval<Scalar>(y) * velocity[i] * w[j];
    }
  }

  MatrixXcd metric_at(const VectorXcd& y) const;
  MatrixXd metric_at_real(const VectorXd& x) const;

  // Max |R^k_lij| at x, with the Gamma-derivatives taken by central finite
  // differences of the expression trees.
  double curvature_residual(const VectorXd& x, double step = 1e-5) const;

  // Sanity checks a freshly loaded spec: metric symmetry on samples, declared
  // signature against eigenvalue counts at the chart center.  Throws ConfigError.
  void validate() const;

  VectorXd chart_center() const { return 0.5 * (chart_domain_.lo + chart_domain_.hi); }

  ManifoldSpec with_tube_radius(double tube) const {
    ManifoldSpec copy = *this;
    copy.tube_radius_ = tube;
    return copy;
  }

  nlohmann::json to_json() const;
  static ManifoldSpec from_json(const nlohmann::json& j);

 private:
  int dim_;
  std::vector<Expr> christoffel_;  // flattened (k, i, j)
  std::optional<std::vector<Expr>> metric_;
  std::optional<std::pair<int, int>> signature_;
  ChartDomain chart_domain_;
  double tube_radius_;
  std::vector<std::array<int, 3>> gamma_support_;
};

// Point of the complexified phase space: chart coordinates and velocity.
struct PhaseState {
  VectorXcd y;
  VectorXcd beta;
};

// Point of TX over the real locus.
struct TangentPoint {
  VectorXd x;
  VectorXd v;
};

}  // namespace hklab
