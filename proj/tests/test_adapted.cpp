#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/SVD>

#include "hklab/adapted.hpp"
#include "hklab/catalog.hpp"

using namespace hklab;

namespace {

VectorXd rvec(std::initializer_list<double> v) {
  VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd standard_structure(int n) {
  MatrixXd J = MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = -MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = MatrixXd::Identity(n, n);
  return J;
}

}  // namespace

TEST_SUITE("tau star") {
  TEST_CASE("eigenvectors and involution") {
    VectorXcd w(2);
    w << Complex(0.3), Complex(-1.2);
    CHECK((tau_star(w) - w).norm() == 0.0);  // real vectors are fixed
    VectorXcd iw = Complex(0, 1) * w;
    CHECK((tau_star(iw) + iw).norm() == 0.0);  // imaginary vectors flip
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    VectorXcd r(3);
    for (int i = 0; i < 3; ++i) r(i) = Complex(u(rng), u(rng));
    CHECK((tau_star(tau_star(r)) - r).norm() == 0.0);
  }
}

TEST_SUITE("embedding of the tangent bundle") {
  TEST_CASE("zero section lands on the real chart") {
    const auto& spec = catalog_entry("sphere-s2").spec;
    TangentPoint p{rvec({1.1, 0.4}), rvec({0.0, 0.0})};
    VectorXcd m = embed_v_minus(spec, p);
    CHECK((m - p.x.cast<Complex>()).norm() < 1e-14);
  }

  TEST_CASE("flat embedding is x + iv, circle gives the cylinder") {
    const auto& flat = catalog_entry("flat-euclidean-2").spec;
    TangentPoint p{rvec({0.2, -0.4}), rvec({0.3, 0.1})};
    VectorXcd m = embed_v_minus(flat, p);
    CHECK(std::abs(m(0) - Complex(0.2, 0.3)) < 1e-14);
    CHECK(std::abs(m(1) - Complex(-0.4, 0.1)) < 1e-14);

    const auto& circ = catalog_entry("circle").spec;
    VectorXcd c = embed_v_minus(circ, TangentPoint{rvec({0.7}), rvec({0.25})});
    CHECK(std::abs(c(0) - Complex(0.7, 0.25)) < 1e-14);
  }
}

TEST_SUITE("adapted complex structure") {
  TEST_CASE("flat chart gives the standard structure of C^n") {
    for (const char* name : {"flat-euclidean-1", "flat-euclidean-2", "flat-euclidean-3"}) {
      const auto& e = catalog_entry(name);
      const int n = e.spec.dim();
      AlmostComplexValue J = adapted_j(e.spec, TangentPoint{e.probe_x, e.probe_v});
      CHECK((J.J - standard_structure(n)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("zero section of any spec gives the standard structure") {
    const auto& spec = catalog_entry("sphere-s2").spec;
    AlmostComplexValue J = adapted_j(spec, TangentPoint{rvec({1.2, 0.3}), rvec({0.0, 0.0})});
    CHECK((J.J - standard_structure(2)).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("J squares to minus the identity away from the zero section") {
    const auto& spec = catalog_entry("sphere-s2").spec;
    TangentPoint p{rvec({M_PI / 2, 0.1}), rvec({0.18, 0.24})};  // |v| = 0.3
    AlmostComplexValue J = adapted_j(spec, p);
    MatrixXd j2 = J.J * J.J + MatrixXd::Identity(4, 4);
    CHECK(j2.cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("pullback consistency with the chart multiplication by i") {
    // push a random tangent through dPhi, multiply by i, pull back: that is J
    const auto& spec = catalog_entry("hyperbolic-h2").spec;
    TangentPoint p{rvec({1.0, 0.2}), rvec({0.1, 0.2})};
    AlmostComplexValue J = adapted_j(spec, p);
    // finite-difference dPhi in a random direction
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    const double h = 1e-6;
    for (int trial = 0; trial < 4; ++trial) {
      VectorXd w(4);
      for (int i = 0; i < 4; ++i) w(i) = u(rng);
      auto phi = [&](const VectorXd& xv) {
        return embed_v_minus(spec, TangentPoint{xv.head(2), xv.tail(2)});
      };
      VectorXd base(4);
      base << p.x, p.v;
      VectorXcd dphi_w = (phi(base + h * w) - phi(base - h * w)) / (2 * h);
      VectorXcd i_dphi_w = Complex(0, 1) * dphi_w;
      VectorXd jw = J.J * w;
      VectorXcd dphi_jw = (phi(base + h * jw) - phi(base - h * jw)) / (2 * h);
      CHECK((dphi_jw - i_dphi_w).cwiseAbs().maxCoeff() < 1e-5);
    }
  }

  TEST_CASE("the real chart is totally real") {
    const auto& spec = catalog_entry("sphere-s2").spec;
    AlmostComplexValue J = adapted_j(spec, TangentPoint{rvec({1.4, -0.2}), rvec({0.0, 0.0})});
    // dv-component of J restricted to dx directions must have full rank
    MatrixXd block = J.J.bottomLeftCorner(2, 2);
    Eigen::JacobiSVD<MatrixXd> svd(block);
    CHECK(svd.singularValues()(1) > 1e-6);
  }

  TEST_CASE("a forced condition limit reports the condition number") {
    const auto& spec = catalog_entry("sphere-s2").spec;
    FlowOptions opts;
    opts.condition_limit = 1.0;
    try {
      adapted_j(spec, TangentPoint{rvec({1.0, 0.0}), rvec({0.1, 0.1})}, opts);
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      CHECK(e.condition_number >= 1.0);
    }
  }
}

TEST_SUITE("leaves of the canonical foliation") {
  const double p_grid[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const double q_grid[] = {-0.3, -0.15, 0.15, 0.3};

  TEST_CASE("flat leaves are exactly holomorphic") {
    const auto& e = catalog_entry("flat-euclidean-2");
    double r = leaf_holomorphicity_residual(e.spec, e.probe_x, e.probe_v, p_grid, q_grid);
    CHECK(r < 1e-10);
  }

  TEST_CASE("sphere equator leaf") {
    const auto& e = catalog_entry("sphere-s2");
    double r = leaf_holomorphicity_residual(e.spec, e.probe_x, e.probe_v, p_grid, q_grid);
    CHECK(r < 1e-6);
  }

  TEST_CASE("hyperbolic plane leaf") {
    const auto& e = catalog_entry("hyperbolic-h2");
    double r = leaf_holomorphicity_residual(e.spec, e.probe_x, e.probe_v, p_grid, q_grid);
    CHECK(r < 1e-6);
  }

  TEST_CASE("torsion does not break adaptedness") {
    const auto& e = catalog_entry("flat-torsion-group");
    double r = leaf_holomorphicity_residual(e.spec, e.probe_x, e.probe_v, p_grid, q_grid);
    CHECK(r < 1e-6);
  }
}

TEST_SUITE("integrability cross-check") {
  TEST_CASE("flat Nijenhuis tensor vanishes") {
    const auto& e = catalog_entry("flat-euclidean-2");
    CHECK(nijenhuis_residual(e.spec, TangentPoint{e.probe_x, e.probe_v}) < 1e-12);
  }

  TEST_CASE("sphere at the zero section and above it") {
    const auto& e = catalog_entry("sphere-s2");
    CHECK(nijenhuis_residual(e.spec, TangentPoint{e.probe_x, VectorXd::Zero(2)}) < 1e-5);
    CHECK(nijenhuis_residual(e.spec, TangentPoint{e.probe_x, rvec({0.12, 0.16})}) < 1e-5);
  }
}
