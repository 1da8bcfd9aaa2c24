#include "hklab/jet_calculus.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace hklab {

std::vector<Jet> identity_jets(const std::shared_ptr<const JetLayout>& layout) {
  std::vector<Jet> vars;
  vars.reserve(layout->num_vars());
  for (int v = 0; v < layout->num_vars(); ++v)
    vars.push_back(Jet::variable(layout, 0.0, v));
  return vars;
}

Jet compose(const Jet& outer, std::span<const Jet> inner) {
  if (outer.is_constant()) {
    if (inner.empty()) return outer;
    return Jet::constant(inner[0].layout(), outer.value());
  }
  if (static_cast<int>(inner.size()) != outer.num_vars())
    throw StructuralError("compose: inner count must match outer num_vars");
  for (const Jet& g : inner) {
    if (g.is_constant() || g.layout() != inner[0].layout())
      throw StructuralError("compose: inner jets must share one layout");
    if (g.value() != Complex(0.0))
      throw DomainError("compose: inner jet has nonzero constant term");
  }
  const auto& Lout = *outer.layout();
  const auto in_layout = inner[0].layout();
  const int K = in_layout->order();

  // Powers of each inner jet up to the order; inner^k has valuation >= k so
  // anything past the order is identically zero after truncation.
  std::vector<std::vector<Jet>> powers(inner.size());
  for (std::size_t v = 0; v < inner.size(); ++v) {
    powers[v].reserve(K + 1);
    powers[v].push_back(Jet::constant(in_layout, 1.0));
    for (int k = 1; k <= K; ++k) powers[v].push_back(powers[v][k - 1] * inner[v]);
  }

  Jet result = Jet::constant(in_layout, 0.0);
  for (int idx = 0; idx < Lout.size(); ++idx) {
    const Complex c = outer.coeff(idx);
    if (c == Complex(0.0)) continue;
    if (Lout.degree(idx) > K) continue;  // valuation kills it
    Jet term = Jet::constant(in_layout, c);
    for (int v = 0; v < Lout.num_vars(); ++v) {
      const int e = Lout.exponent(idx, v);
      if (e > 0) term = term * powers[v][e];
    }
    result += term;
  }
  return result;
}

std::vector<Jet> invert(std::span<const Jet> system) {
  const int n = static_cast<int>(system.size());
  if (n == 0) throw StructuralError("invert: empty system");
  const auto layout = system[0].layout();
  if (!layout || layout->num_vars() != n)
    throw StructuralError("invert: system must be square (n jets in n vars)");
  for (const Jet& f : system) {
    if (f.is_constant() || f.layout() != layout)
      throw StructuralError("invert: jets must share one layout");
    if (f.value() != Complex(0.0))
      throw DomainError("invert: jets must have zero constant term");
  }
  const int K = layout->order();

  MatrixXcd linear(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) linear(k, j) = system[k].coeff_linear(j);

  Eigen::JacobiSVD<MatrixXcd> svd(linear, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e14) {
    throw SingularityError("invert: singular linear part",
                           smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity());
  }
  const MatrixXcd linv = linear.inverse();

  // f = L x + h with h of valuation >= 2; the inverse g satisfies the fixed
  // point g = Linv (x - h(g)), which gains one correct order per sweep.
  std::vector<Jet> higher;
  higher.reserve(n);
  for (int k = 0; k < n; ++k) {
    Jet h = system[k];
    for (int j = 0; j < n; ++j) {
      Jet lin = Jet::variable(layout, 0.0, j);
      h -= Jet(linear(k, j)) * lin;
    }
    higher.push_back(h);
  }

  const std::vector<Jet> vars = identity_jets(layout);
  std::vector<Jet> g(n);
  for (int k = 0; k < n; ++k) {
    g[k] = Jet::constant(layout, 0.0);
    for (int j = 0; j < n; ++j) g[k] += Jet(linv(k, j)) * vars[j];
  }
  for (int sweep = 1; sweep < K; ++sweep) {
    std::vector<Jet> hg(n);
    for (int k = 0; k < n; ++k) hg[k] = compose(higher[k], g);
    for (int k = 0; k < n; ++k) {
      Jet acc = Jet::constant(layout, 0.0);
      for (int j = 0; j < n; ++j) acc += Jet(linv(k, j)) * (vars[j] - hg[j]);
      g[k] = acc;
    }
  }
  return g;
}

Complex evaluate(const Jet& jet, const VectorXcd& displacement) {
  if (jet.is_constant()) return jet.value();
  const JetLayout& L = *jet.layout();
  if (displacement.size() != L.num_vars())
    throw StructuralError("evaluate: displacement size mismatch");
  // Power tables per variable, then a plain monomial sum.
  std::vector<std::vector<Complex>> pw(L.num_vars());
  for (int v = 0; v < L.num_vars(); ++v) {
    pw[v].resize(L.order() + 1);
    pw[v][0] = 1.0;
    for (int k = 1; k <= L.order(); ++k) pw[v][k] = pw[v][k - 1] * displacement(v);
  }
  Complex sum = 0.0;
  for (int i = 0; i < L.size(); ++i) {
    const Complex c = jet.coeff(i);
    if (c == Complex(0.0)) continue;
    Complex m = c;
    for (int v = 0; v < L.num_vars(); ++v) {
      const int e = L.exponent(i, v);
      if (e > 0) m *= pw[v][e];
    }
    sum += m;
  }
  return sum;
}

}  // namespace hklab
