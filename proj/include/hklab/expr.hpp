#pragma once

// Expression trees for real-analytic chart data (Christoffel symbols, metric
// coefficients).  An Expr evaluates on complex scalars and on jets, which is
// what turns the chart formulas into their holomorphic extensions.

#include <memory>
#include <span>
#include <string>

#include <json.hpp>

#include "hklab/jet.hpp"

namespace hklab {

class Expr {
 public:
  enum class Op { Constant, Var, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };
  struct Node;  // opaque; defined in expr.cpp

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v);
  static Expr variable(int index);
  static Expr pow(Expr base, int exponent);

  friend Expr operator+(Expr a, Expr b) { return binary(Op::Add, std::move(a), std::move(b)); }
  friend Expr operator-(Expr a, Expr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
  friend Expr operator*(Expr a, Expr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
  friend Expr operator/(Expr a, Expr b) { return binary(Op::Div, std::move(a), std::move(b)); }
  friend Expr operator-(Expr a) { return binary(Op::Sub, constant(0.0), std::move(a)); }
  friend Expr sin(Expr a);
  friend Expr cos(Expr a);
  friend Expr exp(Expr a);

  bool is_zero() const;      // literal constant 0
  bool is_constant() const;
  int max_var_index() const;

  template <class T>
  T eval(std::span<const T> args) const;

  Complex eval_scalar(const VectorXcd& args) const;
  Jet eval_jet(std::span<const Jet> args) const;

  nlohmann::json to_json() const;
  static Expr from_json(const nlohmann::json& j);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr binary(Op op, Expr a, Expr b);
  static Expr unary(Op op, Expr a);

  std::shared_ptr<const Node> node_;
};

}  // namespace hklab
