#include "hklab/expr.hpp"

#include <algorithm>
#include <cmath>

namespace hklab {

struct Expr::Node {
  Op op;
  double value = 0.0;  // Constant
  int aux = 0;         // Var index or Pow exponent
  std::shared_ptr<const Node> lhs, rhs;
};

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0) throw StructuralError("expr: negative variable index");
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->aux = index;
  return Expr(std::move(n));
}

Expr Expr::pow(Expr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->aux = exponent;
  n->lhs = std::move(base.node_);
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a.node_);
  n->rhs = std::move(b.node_);
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a.node_);
  return Expr(std::move(n));
}

Expr sin(Expr a) { return Expr::unary(Expr::Op::Sin, std::move(a)); }
Expr cos(Expr a) { return Expr::unary(Expr::Op::Cos, std::move(a)); }
Expr exp(Expr a) { return Expr::unary(Expr::Op::Exp, std::move(a)); }

bool Expr::is_zero() const {
  return node_->op == Op::Constant && node_->value == 0.0;
}

bool Expr::is_constant() const { return node_->op == Op::Constant; }

int Expr::max_var_index() const {
  const Node* n = node_.get();
  int m = -1;
  if (n->op == Op::Var) m = n->aux;
  if (n->lhs) m = std::max(m, Expr(n->lhs).max_var_index());
  if (n->rhs) m = std::max(m, Expr(n->rhs).max_var_index());
  return m;
}

template <class T>
static T eval_node(const Expr::Node* n, std::span<const T> args);

template <class T>
T Expr::eval(std::span<const T> args) const {
  return eval_node<T>(node_.get(), args);
}

template <class T>
static T eval_node(const Expr::Node* n, std::span<const T> args) {
  using std::sin;
  using std::cos;
  using std::exp;
  using std::pow;
  switch (n->op) {
    case Expr::Op::Constant:
      return T(n->value);
    case Expr::Op::Var:
      if (n->aux >= static_cast<int>(args.size()))
        throw StructuralError("expr: variable index exceeds argument count");
      return args[n->aux];
    case Expr::Op::Add:
      return eval_node<T>(n->lhs.get(), args) + eval_node<T>(n->rhs.get(), args);
    case Expr::Op::Sub:
      return eval_node<T>(n->lhs.get(), args) - eval_node<T>(n->rhs.get(), args);
    case Expr::Op::Mul:
      return eval_node<T>(n->lhs.get(), args) * eval_node<T>(n->rhs.get(), args);
    case Expr::Op::Div:
      return eval_node<T>(n->lhs.get(), args) / eval_node<T>(n->rhs.get(), args);
    case Expr::Op::Pow:
      return pow(eval_node<T>(n->lhs.get(), args), n->aux);
    case Expr::Op::Sin:
      return sin(eval_node<T>(n->lhs.get(), args));
    case Expr::Op::Cos:
      return cos(eval_node<T>(n->lhs.get(), args));
    case Expr::Op::Exp:
      return exp(eval_node<T>(n->lhs.get(), args));
  }
  throw StructuralError("expr: corrupt node");
}

template Complex Expr::eval<Complex>(std::span<const Complex>) const;
template Jet Expr::eval<Jet>(std::span<const Jet>) const;

Complex Expr::eval_scalar(const VectorXcd& args) const {
  return eval<Complex>(std::span<const Complex>(args.data(), args.size()));
}

Jet Expr::eval_jet(std::span<const Jet> args) const { return eval<Jet>(args); }

namespace {

using nlohmann::json;

const char* op_name(Expr::Op op) {
  switch (op) {
    case Expr::Op::Constant: return "const";
    case Expr::Op::Var: return "var";
    case Expr::Op::Add: return "add";
    case Expr::Op::Sub: return "sub";
    case Expr::Op::Mul: return "mul";
    case Expr::Op::Div: return "div";
    case Expr::Op::Pow: return "pow";
    case Expr::Op::Sin: return "sin";
    case Expr::Op::Cos: return "cos";
    case Expr::Op::Exp: return "exp";
  }
  return "?";
}

}  // namespace

nlohmann::json Expr::to_json() const {
  const Node* n = node_.get();
  json j;
  j["op"] = op_name(n->op);
  switch (n->op) {
    case Op::Constant:
      j["value"] = n->value;
      break;
    case Op::Var:
      j["index"] = n->aux;
      break;
    case Op::Pow:
      j["base"] = Expr(n->lhs).to_json();
      j["exponent"] = n->aux;
      break;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      j["arg"] = Expr(n->lhs).to_json();
      break;
    default:
      j["lhs"] = Expr(n->lhs).to_json();
      j["rhs"] = Expr(n->rhs).to_json();
      break;
  }
  return j;
}

Expr Expr::from_json(const nlohmann::json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "const") return constant(j.at("value").get<double>());
  if (op == "var") return variable(j.at("index").get<int>());
  if (op == "pow") return pow(from_json(j.at("base")), j.at("exponent").get<int>());
  if (op == "sin") return sin(from_json(j.at("arg")));
  if (op == "cos") return cos(from_json(j.at("arg")));
  if (op == "exp") return exp(from_json(j.at("arg")));
  if (op == "add") return from_json(j.at("lhs")) + from_json(j.at("rhs"));
  if (op == "sub") return from_json(j.at("lhs")) - from_json(j.at("rhs"));
  if (op == "mul") return from_json(j.at("lhs")) * from_json(j.at("rhs"));
  if (op == "div") return from_json(j.at("lhs")) / from_json(j.at("rhs"));
  throw ConfigError("expr: unknown op '" + op + "' in JSON");
}

}  // namespace hklab
