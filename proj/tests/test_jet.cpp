#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hklab/jet.hpp"
#include "hklab/jet_calculus.hpp"

using namespace hklab;

namespace {

Jet poly1(const std::shared_ptr<const JetLayout>& L, std::initializer_list<Complex> coeffs) {
  // univariate helper: coeffs by ascending degree
  Jet x = Jet::variable(L, 0.0, 0);
  Jet r = Jet::constant(L, 0.0);
  Jet xk = Jet::constant(L, 1.0);
  for (const Complex& c : coeffs) {
    r += Jet(c) * xk;
    xk = xk * x;
  }
  return r;
}

Jet random_jet(const std::shared_ptr<const JetLayout>& L, std::mt19937_64& rng,
               bool zero_constant = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j = Jet::constant(L, 0.0);
  for (int i = 0; i < L->size(); ++i) j.coeff_ref(i) = Complex(u(rng), u(rng));
  if (zero_constant) j.coeff_ref(0) = 0.0;
  return j;
}

}  // namespace

TEST_SUITE("jet arithmetic") {
  TEST_CASE("cauchy product truncates at the order") {
    auto L2 = JetLayout::get(1, 2);
    Jet x = Jet::variable(L2, 0.0, 0);
    Jet p = (Jet(1.0) + x) * (Jet(1.0) - x);
    CHECK(p.value() == Complex(1.0));
    CHECK(p.coeff_linear(0) == Complex(0.0));
    CHECK(p.coeff(2) == Complex(-1.0));  // 1 - x^2

    auto L1 = JetLayout::get(1, 1);
    Jet x1 = Jet::variable(L1, 0.0, 0);
    Jet q = (Jet(1.0) + x1) * (Jet(1.0) - x1);
    CHECK(q.value() == Complex(1.0));
    CHECK(q.coeff_linear(0) == Complex(0.0));  // degree-2 term truncated
  }

  TEST_CASE("bivariate square") {
    auto L = JetLayout::get(2, 2);
    Jet x = Jet::variable(L, 0.0, 0);
    Jet y = Jet::variable(L, 0.0, 1);
    Jet s = (x + y) * (x + y);
    // x^2 + 2xy + y^2
    CHECK(s.coeff(L->position(2)) == Complex(1.0));          // x^2 packs as exponent 2 in lane 0
    CHECK(s.coeff(L->position(1 | (1 << 8))) == Complex(2.0));
    CHECK(s.coeff(L->position(2 << 8)) == Complex(1.0));
    CHECK(s.value() == Complex(0.0));
  }

  TEST_CASE("shape mismatch is a structural error") {
    auto La = JetLayout::get(1, 2);
    auto Lb = JetLayout::get(2, 2);
    Jet a = Jet::variable(La, 0.0, 0);
    Jet b = Jet::variable(Lb, 0.0, 1);
    CHECK_THROWS_AS(a * b, StructuralError);
    CHECK_THROWS_AS(a + b, StructuralError);
  }

  TEST_CASE("ring axioms on random jets") {
    auto L = JetLayout::get(2, 4);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      Jet a = random_jet(L, rng), b = random_jet(L, rng), c = random_jet(L, rng);
      double scale = a.max_abs_coeff() * b.max_abs_coeff() * c.max_abs_coeff() + 1.0;
      CHECK(max_coeff_distance((a * b) * c, a * (b * c)) < 1e-13 * scale);
      CHECK(max_coeff_distance(a * (b + c), a * b + a * c) < 1e-13 * scale);
      CHECK(max_coeff_distance(a * b, b * a) < 1e-13 * scale);
    }
  }

  TEST_CASE("division against multiplication") {
    auto L = JetLayout::get(2, 4);
    std::mt19937_64 rng(11);
    Jet a = random_jet(L, rng);
    Jet b = random_jet(L, rng);
    b.coeff_ref(0) = Complex(1.3, -0.2);
    Jet q = a / b;
    CHECK(max_coeff_distance(q * b, a) < 1e-12);

    Jet z = random_jet(L, rng, /*zero_constant=*/true);
    CHECK_THROWS_AS(a / z, DomainError);
  }

  TEST_CASE("constants promote") {
    auto L = JetLayout::get(1, 3);
    Jet x = Jet::variable(L, 2.0, 0);
    Jet r = Jet(3.0) * x + Complex(0.0, 1.0);
    CHECK(r.value() == Complex(6.0, 1.0));
    CHECK(r.coeff_linear(0) == Complex(3.0));
  }

  TEST_CASE("large layouts take the hashed product path") {
    auto L = JetLayout::get(3, 10);  // 286 monomials, beyond the dense table
    CHECK(L->size() == 286);
    std::mt19937_64 rng(31);
    Jet a = random_jet(L, rng), b = random_jet(L, rng);
    Jet ab = a * b;
    // spot-check one Cauchy coefficient by hand: pick x0^2 x1 x2
    const std::uint64_t target = 2 | (1 << 8) | (std::uint64_t(1) << 16);
    Complex expect = 0.0;
    for (int i = 0; i < L->size(); ++i) {
      const std::uint64_t pi = L->packed(i);
      for (int j = 0; j < L->size(); ++j) {
        if (pi + L->packed(j) == target && L->degree(i) + L->degree(j) <= 10)
          expect += a.coeff(i) * b.coeff(j);
      }
    }
    CHECK(std::abs(ab.coeff(L->position(target)) - expect) < 1e-12);
    CHECK_THROWS_AS(JetLayout::get(9, 2), StructuralError);
    CHECK_THROWS_AS(JetLayout::get(2, 40), StructuralError);
  }
}

TEST_SUITE("jet composition and inversion") {
  TEST_CASE("outer x^2 with inner x+y") {
    auto Lout = JetLayout::get(1, 2);
    auto Lin = JetLayout::get(2, 2);
    Jet outer = poly1(Lout, {0.0, 0.0, 1.0});  // x^2
    std::vector<Jet> inner = {Jet::variable(Lin, 0.0, 0) + Jet::variable(Lin, 0.0, 1)};
    Jet r = compose(outer, inner);
    CHECK(r.coeff(Lin->position(2)) == Complex(1.0));
    CHECK(r.coeff(Lin->position(1 | (1 << 8))) == Complex(2.0));
    CHECK(r.coeff(Lin->position(2 << 8)) == Complex(1.0));
  }

  TEST_CASE("identity inner jets reproduce the outer") {
    auto L = JetLayout::get(2, 3);
    std::mt19937_64 rng(3);
    Jet outer = random_jet(L, rng);
    Jet r = compose(outer, identity_jets(L));
    CHECK(max_coeff_distance(r, outer) < 1e-15);
  }

  TEST_CASE("scaled sine series") {
    auto L = JetLayout::get(1, 5);
    Jet sin_series = sin(Jet::variable(L, 0.0, 0));
    std::vector<Jet> inner = {Jet(2.0) * Jet::variable(L, 0.0, 0)};
    Jet r = compose(sin_series, inner);
    CHECK(std::abs(r.coeff_linear(0) - Complex(2.0)) < 1e-15);
    CHECK(std::abs(r.coeff(3) - Complex(-4.0 / 3.0)) < 1e-14);
    CHECK(std::abs(r.coeff(5) - Complex(4.0 / 15.0)) < 1e-14);
  }

  TEST_CASE("nonzero inner constant term is rejected") {
    auto L = JetLayout::get(1, 3);
    Jet outer = poly1(L, {0.0, 1.0});
    std::vector<Jet> inner = {Jet::variable(L, 0.5, 0)};
    CHECK_THROWS_AS(compose(outer, inner), DomainError);
  }

  TEST_CASE("linear inversion") {
    auto L = JetLayout::get(1, 3);
    std::vector<Jet> f = {Jet(2.0) * Jet::variable(L, 0.0, 0)};
    auto g = invert(f);
    CHECK(std::abs(g[0].coeff_linear(0) - Complex(0.5)) < 1e-15);
  }

  TEST_CASE("lagrange inversion of x + x^2") {
    auto L = JetLayout::get(1, 3);
    std::vector<Jet> f = {poly1(L, {0.0, 1.0, 1.0})};
    auto g = invert(f);
    // x - x^2 + 2x^3
    CHECK(std::abs(g[0].coeff(1) - Complex(1.0)) < 1e-14);
    CHECK(std::abs(g[0].coeff(2) - Complex(-1.0)) < 1e-14);
    CHECK(std::abs(g[0].coeff(3) - Complex(2.0)) < 1e-14);
  }

  TEST_CASE("random system round trip") {
    auto L = JetLayout::get(3, 4);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<Jet> f;
    for (int k = 0; k < 3; ++k) {
      Jet fk = Jet::variable(L, 0.0, k);  // identity linear part
      Jet pert = random_jet(L, rng, true);
      // keep only degree >= 2 terms of the perturbation
      for (int i = 0; i < L->degree_end(1); ++i) pert.coeff_ref(i) = 0.0;
      f.push_back(fk + Jet(0.2) * pert);
    }
    auto g = invert(f);
    auto ids = identity_jets(L);
    double resid = 0.0;
    for (int k = 0; k < 3; ++k) {
      Jet round = compose(g[k], f);
      resid = std::max(resid, max_coeff_distance(round, ids[k]));
    }
    CHECK(resid < 1e-12);
  }

  TEST_CASE("singular linear part carries a condition number") {
    auto L = JetLayout::get(2, 2);
    Jet x = Jet::variable(L, 0.0, 0);
    std::vector<Jet> f = {x, x};  // rank 1
    try {
      invert(f);
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      CHECK(e.condition_number > 1e14);
    }
  }

  TEST_CASE("numeric evaluation of a series") {
    auto L = JetLayout::get(2, 6);
    std::mt19937_64 rng(23);
    Jet j = random_jet(L, rng);
    VectorXcd h(2);
    h << Complex(0.1, 0.05), Complex(-0.07, 0.02);
    // against Horner-free direct sum with exp/log-free reference: evaluate twice
    Complex v1 = evaluate(j, h);
    Complex v2 = 0.0;
    for (int i = 0; i < L->size(); ++i) {
      Complex m = j.coeff(i);
      for (int v = 0; v < 2; ++v)
        for (int e = 0; e < L->exponent(i, v); ++e) m *= h(v);
      v2 += m;
    }
    CHECK(std::abs(v1 - v2) < 1e-14);
  }
}

TEST_SUITE("jet elementary functions") {
  TEST_CASE("sin at pi/2 with one jet variable") {
    auto L = JetLayout::get(1, 1);
    Jet r = sin(Jet::variable(L, M_PI / 2, 0));
    CHECK(std::abs(r.value() - Complex(1.0)) < 1e-15);
    CHECK(std::abs(r.coeff_linear(0)) < 1e-15);  // cos(pi/2) = 0
  }

  TEST_CASE("first derivatives match central finite differences") {
    auto L = JetLayout::get(1, 1);
    const Complex z0(0.7, 0.3);
    const double h = 1e-6;
    auto check = [&](auto f, auto fs) {
      Jet r = f(Jet::variable(L, z0, 0));
      Complex fd = (fs(z0 + h) - fs(z0 - h)) / (2 * h);
      CHECK(std::abs(r.coeff_linear(0) - fd) < 1e-7);
    };
    check([](const Jet& j) { return sin(j); }, [](Complex z) { return std::sin(z); });
    check([](const Jet& j) { return cos(j); }, [](Complex z) { return std::cos(z); });
    check([](const Jet& j) { return exp(j); }, [](Complex z) { return std::exp(z); });
    check([](const Jet& j) { return inverse(j); }, [](Complex z) { return 1.0 / z; });
  }

  TEST_CASE("pythagorean identity to the working order") {
    auto L = JetLayout::get(2, 5);
    std::mt19937_64 rng(5);
    Jet a = random_jet(L, rng);
    Jet s = sin(a), c = cos(a);
    Jet one = s * s + c * c;
    CHECK(std::abs(one.value() - Complex(1.0)) < 1e-12);
    double tail = 0.0;
    for (int i = 1; i < L->size(); ++i) tail = std::max(tail, std::abs(one.coeff(i)));
    CHECK(tail < 1e-11);
  }

  TEST_CASE("integer powers, including negative") {
    auto L = JetLayout::get(1, 4);
    Jet x = Jet::variable(L, 1.5, 0);
    CHECK(max_coeff_distance(pow(x, 3), x * x * x) < 1e-14);
    CHECK(max_coeff_distance(pow(x, -2), inverse(x * x)) < 1e-14);
    Jet x0 = Jet::variable(L, 0.0, 0);
    CHECK_THROWS_AS(pow(x0, -1), DomainError);
  }

  TEST_CASE("derivative operator") {
    auto L = JetLayout::get(2, 4);
    Jet x = Jet::variable(L, 0.0, 0);
    Jet y = Jet::variable(L, 0.0, 1);
    Jet f = x * x * y + Jet(2.0) * y;
    Jet fx = derivative(f, 0);
    CHECK(max_coeff_distance(fx, Jet(2.0) * x * y) < 1e-15);
    Jet fy = derivative(f, 1);
    CHECK(max_coeff_distance(fy, x * x + Jet(2.0)) < 1e-15);
  }
}

TEST_SUITE("jets inside Eigen vectors") {
  TEST_CASE("vector arithmetic") {
    auto L = JetLayout::get(2, 1);
    VecX<Jet> v(2), w(2);
    v << Jet::variable(L, 1.0, 0), Jet::variable(L, 2.0, 1);
    w = v + v;
    w = w - Jet(0.5) * v;
    CHECK(std::abs(w(0).value() - Complex(1.5)) < 1e-15);
    CHECK(std::abs(w(1).coeff_linear(1) - Complex(1.5)) < 1e-15);
    VecX<Jet> z = VecX<Jet>::Zero(3);
    CHECK(z(2).value() == Complex(0.0));
  }
}
