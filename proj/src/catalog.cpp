#include "hklab/catalog.hpp"

#include <mutex>

namespace hklab {

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<Expr> zero_christoffel(int n) {
  return std::vector<Expr>(n * n * n, Expr::constant(0.0));
}

std::vector<Expr> diagonal_metric(std::initializer_list<double> diag) {
  const int n = static_cast<int>(diag.size());
  std::vector<Expr> g(n * n, Expr::constant(0.0));
  int i = 0;
  for (double d : diag) {
    g[i * n + i] = Expr::constant(d);
    ++i;
  }
  return g;
}

ExampleCatalogEntry flat_euclidean(int n) {
  ChartDomain dom{VectorXd::Constant(n, -2.0), VectorXd::Constant(n, 2.0)};
  std::vector<double> ones(n, 1.0);
  std::vector<Expr> g(n * n, Expr::constant(0.0));
  for (int i = 0; i < n; ++i) g[i * n + i] = Expr::constant(1.0);
  ManifoldSpec spec(n, zero_christoffel(n), g, std::make_pair(n, 0), dom);
  VectorXd x = VectorXd::Zero(n), v = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) v(i) = 0.2 + 0.05 * i;
  return {"flat-euclidean-" + std::to_string(n), std::move(spec), true, true,
          std::make_pair(n, 0), x, v};
}

ExampleCatalogEntry flat_minkowski() {
  ChartDomain dom{vec({-2.0, -2.0}), vec({2.0, 2.0})};
  ManifoldSpec spec(2, zero_christoffel(2), diagonal_metric({1.0, -1.0}), std::make_pair(1, 1),
                    dom);
  return {"flat-minkowski-11", std::move(spec), true, true, std::make_pair(1, 1),
          vec({0.0, 0.0}), vec({0.25, 0.1})};
}

ExampleCatalogEntry circle() {
  ChartDomain dom{vec({-3.141592653589793}), vec({3.141592653589793})};
  ManifoldSpec spec(1, zero_christoffel(1), diagonal_metric({1.0}), std::make_pair(1, 0), dom);
  return {"circle", std::move(spec), true, true, std::make_pair(1, 0), vec({0.3}), vec({0.25})};
}

ExampleCatalogEntry sphere_s2() {
  // geodesic polar chart: ds^2 = dr^2 + sin^2(r) dphi^2
  const Expr r = Expr::variable(0);
  std::vector<Expr> gamma(8, Expr::constant(0.0));
  const int n = 2;
  auto at = [&](int k, int i, int j) -> Expr& { return gamma[(k * n + i) * n + j]; };
  at(0, 1, 1) = -(sin(r) * cos(r));             // Gamma^r_{phi phi}
  at(1, 0, 1) = cos(r) / sin(r);                // Gamma^phi_{r phi}
  at(1, 1, 0) = cos(r) / sin(r);
  std::vector<Expr> g(4, Expr::constant(0.0));
  g[0] = Expr::constant(1.0);
  g[3] = Expr::pow(sin(r), 2);
  ChartDomain dom{vec({0.4, -3.2}), vec({2.7, 3.2})};
  ManifoldSpec spec(2, std::move(gamma), std::move(g), std::make_pair(2, 0), dom);
  return {"sphere-s2", std::move(spec), false, true, std::make_pair(2, 0),
          vec({M_PI / 2, 0.0}), vec({0.0, 1.0})};
}

ExampleCatalogEntry hyperbolic_h2() {
  // ds^2 = dr^2 + sinh^2(r) dphi^2, with sinh/cosh spelled through exp
  const Expr r = Expr::variable(0);
  const Expr half = Expr::constant(0.5);
  const Expr sinh_r = half * (exp(r) - exp(-r));
  const Expr cosh_r = half * (exp(r) + exp(-r));
  std::vector<Expr> gamma(8, Expr::constant(0.0));
  const int n = 2;
  auto at = [&](int k, int i, int j) -> Expr& { return gamma[(k * n + i) * n + j]; };
  at(0, 1, 1) = -(sinh_r * cosh_r);
  at(1, 0, 1) = cosh_r / sinh_r;
  at(1, 1, 0) = cosh_r / sinh_r;
  std::vector<Expr> g(4, Expr::constant(0.0));
  g[0] = Expr::constant(1.0);
  g[3] = Expr::pow(sinh_r, 2);
  ChartDomain dom{vec({0.3, -3.2}), vec({2.2, 3.2})};
  ManifoldSpec spec(2, std::move(gamma), std::move(g), std::make_pair(2, 0), dom);
  return {"hyperbolic-h2", std::move(spec), false, true, std::make_pair(2, 0),
          vec({1.0, 0.0}), vec({0.3, 0.4})};
}

ExampleCatalogEntry flat_torsion_group() {
  // Affine group of the line, left-invariant connection: parallel transport
  // keeps left-invariant frame components constant, so the curvature is zero
  // while the torsion T^2_{12} = Gamma^2_{12} - Gamma^2_{21} = -1 is not.
  // The frame is E_1 = d/da, E_2 = e^a d/db; the algebra is solvable but not
  // nilpotent, which keeps the Nahm flows genuinely nonlinear.
  const int n = 2;
  std::vector<Expr> gamma(n * n * n, Expr::constant(0.0));
  gamma[(1 * n + 0) * n + 1] = Expr::constant(-1.0);  // Gamma^2_{12}
  ChartDomain dom{VectorXd::Constant(2, -1.5), VectorXd::Constant(2, 1.5)};
  ManifoldSpec spec(n, std::move(gamma), std::nullopt, std::nullopt, dom);
  return {"flat-torsion-group", std::move(spec), true, false, std::nullopt,
          vec({0.1, -0.05}), vec({0.3, 0.2})};
}

std::vector<ExampleCatalogEntry> build_catalog() {
  std::vector<ExampleCatalogEntry> entries;
  entries.push_back(flat_euclidean(1));
  entries.push_back(flat_euclidean(2));
  entries.push_back(flat_euclidean(3));
  entries.push_back(flat_minkowski());
  entries.push_back(circle());
  entries.push_back(sphere_s2());
  entries.push_back(hyperbolic_h2());
  entries.push_back(flat_torsion_group());
  for (const auto& e : entries) {
    e.spec.validate();
    if (e.flat) {
      const double r = e.spec.curvature_residual(e.probe_x);
      if (r > 1e-8)
        throw ConfigError("catalog entry '" + e.name + "' is flagged flat but has curvature");
    }
  }
  return entries;
}

}  // namespace

const std::vector<ExampleCatalogEntry>& catalog() {
  static std::once_flag once;
  static std::vector<ExampleCatalogEntry>* entries = nullptr;
  std::call_once(once, [] { entries = new std::vector<ExampleCatalogEntry>(build_catalog()); });
  return *entries;
}

const ExampleCatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown catalog example '" + name + "'");
}

}  // namespace hklab
