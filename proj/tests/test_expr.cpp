#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hklab/expr.hpp"
#include "hklab/jet.hpp"

using namespace hklab;

TEST_SUITE("expression evaluation") {
  TEST_CASE("sin at pi/2") {
    Expr e = sin(Expr::variable(0));
    VectorXcd args(1);
    args << Complex(M_PI / 2);
    CHECK(std::abs(e.eval_scalar(args) - Complex(1.0)) < 1e-15);
  }

  TEST_CASE("sin on a 1-jet at pi/2") {
    Expr e = sin(Expr::variable(0));
    auto L = JetLayout::get(1, 1);
    std::vector<Jet> args = {Jet::variable(L, M_PI / 2, 0)};
    Jet r = e.eval_jet(args);
    CHECK(std::abs(r.value() - Complex(1.0)) < 1e-15);
    CHECK(std::abs(r.coeff_linear(0)) < 1e-15);
  }

  TEST_CASE("rational expression derivative against finite differences") {
    // cot r, the phi-r Christoffel symbol of the round sphere chart
    Expr cot = cos(Expr::variable(0)) / sin(Expr::variable(0));
    const Complex r0(1.1, 0.2);
    auto L = JetLayout::get(1, 1);
    std::vector<Jet> args = {Jet::variable(L, r0, 0)};
    Complex deriv = cot.eval_jet(args).coeff_linear(0);

    const double h = 1e-6;
    VectorXcd a(1);
    a << r0 + h;
    Complex fp = cot.eval_scalar(a);
    a << r0 - h;
    Complex fm = cot.eval_scalar(a);
    CHECK(std::abs(deriv - (fp - fm) / (2 * h)) < 1e-8);
  }

  TEST_CASE("division by a jet with zero constant term") {
    Expr e = Expr::constant(1.0) / Expr::variable(0);
    auto L = JetLayout::get(1, 2);
    std::vector<Jet> args = {Jet::variable(L, 0.0, 0)};
    CHECK_THROWS_AS(e.eval_jet(args), DomainError);
  }

  TEST_CASE("argument count is checked") {
    Expr e = Expr::variable(3);
    VectorXcd args(2);
    args << Complex(1.0), Complex(2.0);
    CHECK_THROWS_AS(e.eval_scalar(args), StructuralError);
  }

  TEST_CASE("json round trip") {
    Expr e = Expr::pow(sin(Expr::variable(0)), 2) +
             exp(-Expr::variable(1)) / (Expr::constant(2.0) * cos(Expr::variable(0)));
    nlohmann::json j = e.to_json();
    Expr back = Expr::from_json(j);
    VectorXcd args(2);
    args << Complex(0.4, 0.1), Complex(-0.3, 0.2);
    CHECK(std::abs(e.eval_scalar(args) - back.eval_scalar(args)) < 1e-15);
    CHECK(back.to_json() == j);
  }

  TEST_CASE("unknown op rejected") {
    nlohmann::json j = {{"op", "tanh"}, {"arg", {{"op", "var"}, {"index", 0}}}};
    CHECK_THROWS_AS(Expr::from_json(j), ConfigError);
  }

  TEST_CASE("zero detection and var scan") {
    CHECK(Expr::constant(0.0).is_zero());
    CHECK(!Expr::constant(1.0).is_zero());
    Expr e = Expr::variable(2) * sin(Expr::variable(5));
    CHECK(e.max_var_index() == 5);
  }
}
