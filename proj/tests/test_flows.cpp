#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hklab/catalog.hpp"
#include "hklab/flows.hpp"

using namespace hklab;

namespace {

VectorXcd cvec(std::initializer_list<Complex> v) {
  VectorXcd out(static_cast<int>(v.size()));
  int i = 0;
  for (const Complex& x : v) out(i++) = x;
  return out;
}

const ManifoldSpec& flat2() { return catalog_entry("flat-euclidean-2").spec; }
const ManifoldSpec& sphere() { return catalog_entry("sphere-s2").spec; }

}  // namespace

TEST_SUITE("geodesic flow") {
  TEST_CASE("flat straight lines") {
    const auto& spec = flat2();
    PhaseState s{cvec({0.1, -0.2}), cvec({0.3, 0.5})};
    const Complex z(0.7, 0.4);
    PhaseState out = geodesic_flow(spec, s, z, 64);
    CHECK((out.y - (s.y + z * s.beta)).norm() < 1e-14);
    CHECK((out.beta - s.beta).norm() < 1e-14);
  }

  TEST_CASE("zero time is the identity") {
    const auto& spec = sphere();
    PhaseState s{cvec({M_PI / 2, 0.0}), cvec({0.1, 0.9})};
    PhaseState out = geodesic_flow(spec, s, 0.0, 8);
    CHECK((out.y - s.y).norm() == 0.0);
    CHECK((out.beta - s.beta).norm() == 0.0);
  }

  TEST_CASE("equator of the round sphere") {
    const auto& spec = sphere();
    PhaseState s{cvec({M_PI / 2, 0.0}), cvec({0.0, 1.0})};
    for (double t : {0.3, 0.8, 1.4}) {
      PhaseState out = geodesic_flow(spec, s, t, 128);
      CHECK(std::abs(out.y(0) - Complex(M_PI / 2)) < 1e-10);
      CHECK(std::abs(out.y(1) - Complex(t)) < 1e-10);
    }
  }

  TEST_CASE("semigroup identity along complex times") {
    const auto& spec = sphere();
    PhaseState s{cvec({M_PI / 2, 0.2}), cvec({0.15, 0.3})};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int trial = 0; trial < 8; ++trial) {
      const Complex z1(u(rng), 0.4 * u(rng)), z2(u(rng), 0.4 * u(rng));
      PhaseState direct = geodesic_flow(spec, s, z1 + z2, 128);
      PhaseState mid = geodesic_flow(spec, s, z2, 128);
      PhaseState two = geodesic_flow(spec, mid, z1, 128);
      CHECK((direct.y - two.y).norm() < 1e-9);
      CHECK((direct.beta - two.beta).norm() < 1e-9);
    }
  }

  TEST_CASE("path independence in complex time") {
    const auto& spec = sphere();
    PhaseState s{cvec({M_PI / 2, -0.1}), cvec({0.2, 0.25})};
    const Complex z(0.9, 0.3);
    PhaseState direct = geodesic_flow(spec, s, z, 128);
    for (const Complex w : {Complex(0.2, 0.35), Complex(0.6, -0.1)}) {
      PhaseState mid = geodesic_flow(spec, s, w, 128);
      PhaseState bent = geodesic_flow(spec, mid, z - w, 128);
      CHECK((direct.y - bent.y).norm() < 1e-8);
    }
  }

  TEST_CASE("conjugation equivariance") {
    const auto& spec = sphere();
    PhaseState s{cvec({Complex(1.3, 0.1), Complex(0.2, -0.05)}),
                 cvec({Complex(0.2, 0.1), Complex(0.3, -0.2)})};
    const Complex z(0.5, 0.3);
    PhaseState a = geodesic_flow(spec, s, z, 64);
    PhaseState b = geodesic_flow(spec, PhaseState{s.y.conjugate(), s.beta.conjugate()},
                                 std::conj(z), 64);
    CHECK((a.y.conjugate() - b.y).norm() < 1e-12);
    CHECK((a.beta.conjugate() - b.beta).norm() < 1e-12);
  }

  TEST_CASE("step halving shows fourth order") {
    const auto& spec = sphere();
    PhaseState s{cvec({M_PI / 2, 0.1}), cvec({0.3, 0.8})};
    const Complex z(1.2, 0.35);
    PhaseState ref = geodesic_flow(spec, s, z, 1024, FlowOptions{.min_steps = 1});
    auto err = [&](int steps) {
      PhaseState o = geodesic_flow(spec, s, z, steps, FlowOptions{.min_steps = 1});
      return (o.y - ref.y).norm() + (o.beta - ref.beta).norm();
    };
    const double e8 = err(8), e16 = err(16);
    const double order = std::log2(e8 / e16);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
  }

  TEST_CASE("blow-up and domain exit are reported with a time fraction") {
    const auto& spec = catalog_entry("hyperbolic-h2").spec;
    PhaseState s{cvec({1.0, 0.0}), cvec({1.0, 0.4})};
    try {
      geodesic_flow(spec, s, Complex(4.0, 0.0), 256);
      FAIL("expected an exit");
    } catch (const DomainExitError& e) {
      CHECK(e.exit_fraction > 0.0);
      CHECK(e.exit_fraction <= 1.0);
    } catch (const BlowUpError& e) {
      CHECK(e.exit_fraction > 0.0);
    }
  }
}

TEST_SUITE("exponential map and differential") {
  TEST_CASE("flat exponential is affine") {
    const auto& spec = flat2();
    VectorXcd y = cvec({0.2, 0.1}), v = cvec({0.3, -0.2});
    const Complex z(0.4, 0.3);
    CHECK((exp_c(spec, y, v, z, 64) - (y + z * v)).norm() < 1e-14);
    CHECK((exp_c(spec, y, VectorXcd::Zero(2), z, 64) - y).norm() == 0.0);
  }

  TEST_CASE("flat differential blocks are [I zI; 0 I]") {
    const auto& spec = flat2();
    const Complex z(0.5, 0.2);
    MatrixXcd d = exp_c_differential(spec, cvec({0.0, 0.0}), cvec({0.1, 0.2}), z, 64);
    MatrixXcd expect = MatrixXcd::Identity(4, 4);
    expect(0, 2) = z;
    expect(1, 3) = z;
    CHECK((d - expect).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("differential at z = 0 is the identity") {
    const auto& spec = sphere();
    MatrixXcd d = exp_c_differential(spec, cvec({1.2, 0.3}), cvec({0.2, 0.1}), 0.0, 8);
    CHECK((d - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("differential against central finite differences") {
    const auto& spec = sphere();
    const VectorXcd y = cvec({M_PI / 2, 0.1}), v = cvec({0.2, 0.3});
    const Complex z(0.0, 0.25);
    MatrixXcd d = exp_c_differential(spec, y, v, z, 128);
    const double h = 1e-5;
    for (int c = 0; c < 4; ++c) {
      VectorXcd yp = y, ym = y, vp = v, vm = v;
      if (c < 2) {
        yp(c) += h;
        ym(c) -= h;
      } else {
        vp(c - 2) += h;
        vm(c - 2) -= h;
      }
      PhaseState op = geodesic_flow(spec, {yp, vp}, z, 128);
      PhaseState om = geodesic_flow(spec, {ym, vm}, z, 128);
      VectorXcd col(4);
      col << (op.y - om.y) / (2 * h), (op.beta - om.beta) / (2 * h);
      CHECK((d.col(c) - col).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_SUITE("jacobi fields") {
  TEST_CASE("flat fields are affine in t") {
    const auto& spec = flat2();
    const double grid[] = {0.0, 0.5, 1.0};
    auto samples = jacobi_field(spec, cvec({0.0, 0.0}), cvec({0.2, 0.1}), cvec({1.0, 0.0}),
                                cvec({0.0, 2.0}), grid);
    for (const auto& s : samples) {
      CHECK(std::abs(s.u(0) - Complex(1.0)) < 1e-13);
      CHECK(std::abs(s.u(1) - Complex(2.0 * s.t)) < 1e-13);
      CHECK(std::abs(s.udot(1) - Complex(2.0)) < 1e-13);
    }
  }

  TEST_CASE("orthogonal field on the unit sphere has norm sin t") {
    const auto& spec = sphere();
    const double grid[] = {0.0, M_PI / 4, M_PI / 2};
    // unit-speed equator, normal variation seeded in the radial direction
    auto samples = jacobi_field(spec, cvec({M_PI / 2, 0.0}), cvec({0.0, 1.0}), cvec({0.0, 0.0}),
                                cvec({1.0, 0.0}), grid, 128);
    for (const auto& s : samples) {
      MatrixXcd g = spec.metric_at(cvec({M_PI / 2, s.t}));
      const Complex norm2 = (s.u.transpose() * g * s.u)(0);
      CHECK(std::abs(std::sqrt(std::abs(norm2)) - std::abs(std::sin(s.t))) < 1e-7);
    }
  }

  TEST_CASE("tangential seed reproduces the velocity field") {
    const auto& spec = sphere();
    const VectorXcd y = cvec({M_PI / 2, 0.0});
    const VectorXcd v = cvec({0.1, 0.9});
    const double grid[] = {0.0, 0.4, 0.9};
    auto samples = jacobi_field(spec, y, v, v, cvec({0.0, 0.0}), grid, 128);
    // u(t) = gamma-dot(t) wherever u0 = gamma-dot(0), u0dot matching the
    // geodesic equation; seeding udot = acceleration keeps it exactly tangent.
    // With u0dot = 0 the plain-derivative seed corresponds to u = gamma-dot
    // only in the flat case, so compare against the transported velocity here.
    for (const auto& s : samples) {
      PhaseState o = geodesic_flow(spec, {y, v}, s.t, 128);
      // component along the velocity stays dominant; check u solves the same
      // linearized flow as a genuine variation: finite-difference oracle
      PhaseState op = geodesic_flow(spec, {y + 1e-6 * v, v}, s.t, 128);
      VectorXcd fd = (op.y - o.y) / 1e-6;
      CHECK((s.u - fd).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_SUITE("parallel transport") {
  TEST_CASE("flat transport is constant") {
    const auto& spec = flat2();
    VectorXcd w = parallel_transport(spec, cvec({0.0, 0.0}), cvec({0.3, 0.1}), Complex(1.0, 0.2),
                                     cvec({0.7, -0.4}), 64);
    CHECK((w - cvec({0.7, -0.4})).norm() < 1e-14);
  }

  TEST_CASE("zero-length path returns the input") {
    const auto& spec = sphere();
    VectorXcd w0 = cvec({0.4, 0.2});
    VectorXcd w = parallel_transport(spec, cvec({1.0, 0.0}), cvec({0.0, 1.0}), 0.0, w0, 8);
    CHECK((w - w0).norm() == 0.0);
  }

  TEST_CASE("metric pairing with the velocity is conserved on the sphere") {
    const auto& spec = sphere();
    const VectorXcd y = cvec({M_PI / 2, 0.0}), v = cvec({0.0, 1.0});
    const VectorXcd w0 = cvec({0.5, 0.3});
    const double t = M_PI / 2;
    VectorXcd w = parallel_transport(spec, y, v, t, w0, 256);
    PhaseState end = geodesic_flow(spec, {y, v}, t, 256);
    const Complex before = (w0.transpose() * spec.metric_at(y) * v)(0);
    const Complex after = (w.transpose() * spec.metric_at(end.y) * end.beta)(0);
    CHECK(std::abs(before - after) < 1e-8);
    // norm is conserved as well
    const Complex n0 = (w0.transpose() * spec.metric_at(y) * w0)(0);
    const Complex n1 = (w.transpose() * spec.metric_at(end.y) * w)(0);
    CHECK(std::abs(n0 - n1) < 1e-8);
  }
}
