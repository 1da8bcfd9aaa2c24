#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "hklab/catalog.hpp"
#include "hklab/metric_forms.hpp"
#include "hklab/normal_bundle.hpp"

using namespace hklab;

namespace {

VectorXd rvec(std::initializer_list<double> v) {
  VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

VectorXcd cvec(std::initializer_list<Complex> v) {
  VectorXcd out(static_cast<int>(v.size()));
  int i = 0;
  for (const Complex& x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_SUITE("canonical one-form") {
  TEST_CASE("flat pairings") {
    const auto& spec = catalog_entry("flat-euclidean-2").spec;
    TangentPoint z{rvec({0.0, 0.0}), rvec({1.0, 0.0})};
    CHECK(theta(spec, z, rvec({0.0, 1.0, 0.3, -0.2})) == 0.0);  // orthogonal direction
    CHECK(theta(spec, z, rvec({1.0, 0.0, 0.5, 0.5})) == 1.0);
    TangentPoint zero{rvec({0.3, -0.1}), rvec({0.0, 0.0})};
    CHECK(theta(spec, zero, rvec({0.7, -0.3, 0.1, 0.9})) == 0.0);
  }

  TEST_CASE("flat bilinear closed form on complex data") {
    const auto& spec = catalog_entry("flat-euclidean-2").spec;
    VectorXcd beta = cvec({Complex(0.3, -0.1), Complex(0.2, 0.4)});
    VectorXcd dy = cvec({Complex(-0.2, 0.5), Complex(0.1, -0.3)});
    Complex tt = theta_tilde(spec, cvec({Complex(0.1, 0.2), Complex(0.0, -0.1)}), beta, dy,
                             cvec({0.0, 0.0}));
    CHECK(std::abs(tt - (beta(0) * dy(0) + beta(1) * dy(1))) == 0.0);
  }

  TEST_CASE("holomorphic extension restricts and conjugates") {
    const auto& spec = catalog_entry("sphere-s2").spec;
    // real data: matches theta
    TangentPoint z{rvec({1.2, 0.3}), rvec({0.2, -0.1})};
    VectorXd a = rvec({0.4, 0.1, -0.3, 0.2});
    Complex tt = theta_tilde(spec, z.x.cast<Complex>(), z.v.cast<Complex>(),
                             a.head(2).cast<Complex>(), a.tail(2).cast<Complex>());
    CHECK(std::abs(tt - Complex(theta(spec, z, a))) < 1e-14);

    // conjugation equivariance on complex data
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int trial = 0; trial < 5; ++trial) {
      VectorXcd y(2), beta(2), dy(2), db(2);
      for (int i = 0; i < 2; ++i) {
        y(i) = Complex(1.0 + u(rng), 0.5 * u(rng));
        beta(i) = Complex(u(rng), u(rng));
        dy(i) = Complex(u(rng), u(rng));
        db(i) = Complex(u(rng), u(rng));
      }
      Complex a1 = theta_tilde(spec, y.conjugate(), beta.conjugate(), dy.conjugate(),
                               db.conjugate());
      Complex a2 = std::conj(theta_tilde(spec, y, beta, dy, db));
      CHECK(std::abs(a1 - a2) < 1e-12);
    }
  }
}

TEST_SUITE("normal section basis") {
  TEST_CASE("solves the gluing system and is sigma-real") {
    for (int n : {1, 2, 3}) {
      NormalSectionBasis basis(n);
      CHECK(basis.gluing_residual() < 1e-14);
      CHECK(basis.reality_residual() < 1e-14);
      CHECK(basis.size() == normal_bundle_h0(NormalBundleModel::adapted(n, 0)).dim);
    }
  }
}

TEST_SUITE("form triple at the real chart") {
  TEST_CASE("flat euclidean gives the standard triple") {
    const auto& e = catalog_entry("flat-euclidean-1");
    FormTriple t = omega_triple_at_x(e.spec, e.probe_x);
    CHECK(t.fit_residual < 1e-12);
    CHECK(t.imag_residual < 1e-12);
    CHECK(t.metric_agreement < 1e-12);
    CHECK((t.metric - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    // standard triple in the basis order (E1, E2, E3, E4)
    MatrixXd w1 = MatrixXd::Zero(4, 4), w2 = MatrixXd::Zero(4, 4), w3 = MatrixXd::Zero(4, 4);
    w1(0, 1) = -1; w1(1, 0) = 1; w1(2, 3) = -1; w1(3, 2) = 1;
    w2(0, 2) = -1; w2(2, 0) = 1; w2(1, 3) = 1; w2(3, 1) = -1;
    w3(0, 3) = -1; w3(3, 0) = 1; w3(1, 2) = -1; w3(2, 1) = 1;
    CHECK((t.omega1 - w1).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((t.omega2 - w2).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((t.omega3 - w3).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("sphere block restriction and agreements") {
    const auto& e = catalog_entry("sphere-s2");
    const VectorXd x = rvec({1.1, 0.4});
    FormTriple t = omega_triple_at_x(e.spec, x);
    CHECK(t.fit_residual < 1e-9);
    CHECK(t.imag_residual < 1e-9);
    CHECK(t.metric_agreement < 1e-7);
    CHECK((t.metric - t.metric.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    // the dx-block reproduces g(x)
    const MatrixXd g = e.spec.metric_at_real(x);
    CHECK((t.metric.topLeftCorner(2, 2) - g).cwiseAbs().maxCoeff() < 1e-6);
    // the four section groups are mutually orthogonal
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        CHECK(t.metric.block(2 * a, 2 * b, 2, 2).cwiseAbs().maxCoeff() < 1e-7);
    // omega2 is nondegenerate
    CHECK(std::abs(t.omega2.determinant()) > 1e-3);
  }

  TEST_CASE("signatures") {
    CHECK(signature_at_x(catalog_entry("sphere-s2").spec, rvec({M_PI / 2, 0.0})) ==
          std::make_pair(8, 0));
    CHECK(signature_at_x(catalog_entry("flat-minkowski-11").spec, rvec({0.0, 0.0})) ==
          std::make_pair(4, 4));
    CHECK(signature_at_x(catalog_entry("flat-euclidean-1").spec, rvec({0.0})) ==
          std::make_pair(4, 0));
    CHECK(signature_at_x(catalog_entry("hyperbolic-h2").spec, rvec({1.0, 0.0})) ==
          std::make_pair(8, 0));
  }
}

TEST_SUITE("kaehler form comparison") {
  TEST_CASE("flat chart is exact") {
    const auto& e = catalog_entry("flat-euclidean-2");
    std::vector<MetricSample> samples;
    samples.push_back({rvec({0.1, -0.2}), rvec({0.15, 0.1}), rvec({1.0, 0.0, 0.0, 0.0}),
                       rvec({0.0, 0.0, 1.0, 0.0})});
    samples.push_back({rvec({0.0, 0.0}), rvec({0.0, 0.2}), rvec({0.3, 1.0, -0.2, 0.4}),
                       rvec({-0.5, 0.2, 0.8, 1.0})});
    CHECK(lempert_szoke_residual(e.spec, samples) < 1e-10);
  }

  TEST_CASE("circle") {
    const auto& e = catalog_entry("circle");
    std::vector<MetricSample> samples;
    samples.push_back({rvec({0.4}), rvec({0.2}), rvec({1.0, 0.0}), rvec({0.0, 1.0})});
    samples.push_back({rvec({-0.3}), rvec({0.1}), rvec({0.6, -0.4}), rvec({0.2, 0.9})});
    CHECK(lempert_szoke_residual(e.spec, samples) < 1e-8);
  }

  TEST_CASE("sphere inside the tube") {
    const auto& e = catalog_entry("sphere-s2");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<MetricSample> samples;
    for (int k = 0; k < 3; ++k) {
      VectorXd a1(4), a2(4);
      for (int i = 0; i < 4; ++i) {
        a1(i) = u(rng);
        a2(i) = u(rng);
      }
      samples.push_back({rvec({M_PI / 2 + 0.2 * u(rng), 0.3 * u(rng)}),
                         rvec({0.12 * u(rng), 0.15 * u(rng)}), a1, a2});
    }
    CHECK(lempert_szoke_residual(e.spec, samples) < 1e-5);
  }
}

TEST_SUITE("jacobi pairing identity") {
  TEST_CASE("flat chart is exact") {
    const auto& e = catalog_entry("flat-euclidean-2");
    double r = jacobi_identity_residual(e.spec, rvec({0.1, 0.0}), rvec({0.2, 0.1}),
                                        cvec({0.3, -0.2}), cvec({0.1, 0.4}));
    CHECK(r < 1e-12);
  }

  TEST_CASE("sphere with random seeds") {
    const auto& e = catalog_entry("sphere-s2");
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
      VectorXcd u0(2), udot(2);
      for (int i = 0; i < 2; ++i) {
        u0(i) = Complex(u(rng), u(rng));
        udot(i) = Complex(u(rng), u(rng));
      }
      double r = jacobi_identity_residual(e.spec, rvec({M_PI / 2, 0.0}), rvec({0.1, 0.25}),
                                          u0, udot);
      CHECK(r < 1e-6);
    }
  }

  TEST_CASE("tangential seed conserves the energy pairing") {
    const auto& e = catalog_entry("sphere-s2");
    const VectorXd x = rvec({M_PI / 2, 0.0});
    const VectorXd v = rvec({0.15, 0.2});
    const VectorXcd gamma_dot0 = Complex(0, 1) * v.cast<Complex>();
    double r = jacobi_identity_residual(e.spec, x, v, gamma_dot0, cvec({0.0, 0.0}));
    CHECK(r < 1e-9);
  }

  TEST_CASE("orthogonal decomposition along the complex geodesic") {
    const auto& e = catalog_entry("sphere-s2");
    const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    JacobiDecomposition d =
        decompose_jacobi_field(e.spec, rvec({M_PI / 2, 0.0}), rvec({0.1, 0.2}),
                               cvec({0.2, -0.1}), cvec({-0.15, 0.25}), grid);
    CHECK(d.orthogonality_residual < 1e-7);
    CHECK(d.u_norm_profile.size() == 5);
  }
}
