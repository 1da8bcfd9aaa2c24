#include "hklab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hklab {

namespace {

void enumerate_monomials(int num_vars, int order, int var, int remaining,
                         std::uint64_t packed, int degree,
                         std::vector<std::uint64_t>& out_packed,
                         std::vector<std::uint8_t>& out_degree) {
  if (var == num_vars) {
    out_packed.push_back(packed);
    out_degree.push_back(static_cast<std::uint8_t>(degree));
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    enumerate_monomials(num_vars, order, var + 1, remaining - e,
                        packed | (static_cast<std::uint64_t>(e) << (8 * var)),
                        degree + e, out_packed, out_degree);
  }
}

}  // namespace

JetLayout::JetLayout(int num_vars, int order) : num_vars_(num_vars), order_(order) {
  if (num_vars < 1 || num_vars > kMaxVars)
    throw StructuralError("jet layout: num_vars out of range");
  if (order < 0 || order > kMaxOrder)
    throw StructuralError("jet layout: order out of range");

  // Collect monomials degree by degree so graded order comes for free.
  std::vector<std::uint64_t> packed_of_degree;
  std::vector<std::uint8_t> degree_of;
  enumerate_monomials(num_vars, order, 0, order, 0, 0, packed_of_degree, degree_of);

  std::vector<int> perm(packed_of_degree.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    if (degree_of[a] != degree_of[b]) return degree_of[a] < degree_of[b];
    return packed_of_degree[a] < packed_of_degree[b];
  });

  packed_.reserve(perm.size());
  degree_.reserve(perm.size());
  for (int p : perm) {
    packed_.push_back(packed_of_degree[p]);
    degree_.push_back(degree_of[p]);
  }
  degree_end_.assign(order + 1, 0);
  for (std::size_t i = 0; i < packed_.size(); ++i) {
    position_.emplace(packed_[i], static_cast<int>(i));
  }
  for (int d = 0; d <= order; ++d) {
    int end = 0;
    while (end < size() && degree_[end] <= d) ++end;
    degree_end_[d] = end;
  }
  var_position_.assign(num_vars, 0);
  for (int v = 0; v < num_vars; ++v) {
    int pos = order >= 1 ? position(std::uint64_t(1) << (8 * v)) : -1;
    var_position_[v] = pos;
  }

  // Dense product table keeps series multiplication off the hash path for the
  // sizes the Nahm flows actually use.
  if (size() <= 256) {
    product_.assign(static_cast<std::size_t>(size()) * size(), -1);
    for (int i = 0; i < size(); ++i) {
      for (int j = 0; j < size(); ++j) {
        if (degree_[i] + degree_[j] <= order) {
          product_[static_cast<std::size_t>(i) * size() + j] = position(packed_[i] + packed_[j]);
        }
      }
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int num_vars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(num_vars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto layout = std::shared_ptr<const JetLayout>(new JetLayout(num_vars, order));
  cache.emplace(key, layout);
  return layout;
}

Jet Jet::variable(std::shared_ptr<const JetLayout> layout, const Complex& value, int var) {
  if (var < 0 || var >= layout->num_vars())
    throw StructuralError("jet variable index out of range");
  Jet j = constant(layout, value);
  if (layout->order() >= 1) j.coeffs_[layout->variable_position(var)] = 1.0;
  return j;
}

Jet Jet::linear(std::shared_ptr<const JetLayout> layout, const Complex& value,
                std::span<const Complex> gradient) {
  if (static_cast<int>(gradient.size()) != layout->num_vars())
    throw StructuralError("jet gradient size mismatch");
  Jet j = constant(layout, value);
  if (layout->order() >= 1) {
    for (int v = 0; v < layout->num_vars(); ++v)
      j.coeffs_[layout->variable_position(v)] = gradient[v];
  }
  return j;
}

void Jet::require_same_shape(const Jet& a, const Jet& b) {
  if (a.layout_->num_vars() != b.layout_->num_vars() ||
      a.layout_->order() != b.layout_->order())
    throw StructuralError("jet shape mismatch");
}

double Jet::max_abs_coeff() const {
  if (!layout_) return std::abs(value_);
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Jet& Jet::operator+=(const Jet& rhs) {
  if (!rhs.layout_) {
    if (!layout_) value_ += rhs.value_;
    else coeffs_[0] += rhs.value_;
    return *this;
  }
  if (!layout_) { *this = promoted(rhs); }
  require_same_shape(*this, rhs);
  for (int i = 0; i < size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  if (!rhs.layout_) {
    if (!layout_) value_ -= rhs.value_;
    else coeffs_[0] -= rhs.value_;
    return *this;
  }
  if (!layout_) { *this = promoted(rhs); }
  require_same_shape(*this, rhs);
  for (int i = 0; i < size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  if (!r.layout_) { r.value_ = -r.value_; return r; }
  for (Complex& c : r.coeffs_) c = -c;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.layout_ && !b.layout_) return Jet(a.value_ * b.value_);
  if (!a.layout_) {
    Jet r = b;
    for (Complex& c : r.coeffs_) c *= a.value_;
    return r;
  }
  if (!b.layout_) {
    Jet r = a;
    for (Complex& c : r.coeffs_) c *= b.value_;
    return r;
  }
  Jet::require_same_shape(a, b);
  const JetLayout& L = *a.layout_;
  Jet r = Jet::constant(a.layout_, 0.0);
  const int order = L.order();
  for (int i = 0; i < L.size(); ++i) {
    const Complex ai = a.coeffs_[i];
    if (ai == Complex(0.0)) continue;
    const int jend = L.degree_end(order - L.degree(i));
    for (int j = 0; j < jend; ++j) {
      const Complex bj = b.coeffs_[j];
      if (bj == Complex(0.0)) continue;
      r.coeffs_[L.product_position(i, j)] += ai * bj;
    }
  }
  return r;
}

Jet Jet::elementary(const Jet& a, const std::vector<Complex>& derivs_over_factorial) {
  // f(c + h) = sum_k f^(k)(c)/k! h^k with h the nilpotent part of a.
  Jet h = a;
  h.coeffs_[0] = 0.0;
  Jet result = constant(a.layout_, derivs_over_factorial[0]);
  Jet hk = constant(a.layout_, 1.0);
  const int K = a.order();
  for (int k = 1; k <= K; ++k) {
    hk = hk * h;
    if (derivs_over_factorial[k] != Complex(0.0)) {
      Jet term = hk;
      for (Complex& c : term.coeffs_) c *= derivs_over_factorial[k];
      result += term;
    }
  }
  return result;
}

Jet sin(const Jet& a) {
  if (!a.layout_) return Jet(std::sin(a.value_));
  const Complex s = std::sin(a.value()), c = std::cos(a.value());
  std::vector<Complex> d(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    switch (k % 4) {
      case 0: d[k] = s / fact; break;
      case 1: d[k] = c / fact; break;
      case 2: d[k] = -s / fact; break;
      default: d[k] = -c / fact; break;
    }
  }
  return Jet::elementary(a, d);
}

Jet cos(const Jet& a) {
  if (!a.layout_) return Jet(std::cos(a.value_));
  const Complex s = std::sin(a.value()), c = std::cos(a.value());
  std::vector<Complex> d(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    switch (k % 4) {
      case 0: d[k] = c / fact; break;
      case 1: d[k] = -s / fact; break;
      case 2: d[k] = -c / fact; break;
      default: d[k] = s / fact; break;
    }
  }
  return Jet::elementary(a, d);
}

Jet exp(const Jet& a) {
  if (!a.layout_) return Jet(std::exp(a.value_));
  const Complex e = std::exp(a.value());
  std::vector<Complex> d(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    d[k] = e / fact;
  }
  return Jet::elementary(a, d);
}

Jet inverse(const Jet& a) {
  if (!a.layout_) {
    if (a.value_ == Complex(0.0)) throw DomainError("division by zero constant");
    return Jet(Complex(1.0) / a.value_);
  }
  const Complex c0 = a.value();
  if (c0 == Complex(0.0))
    throw DomainError("division by a jet with zero constant term");
  // 1/(c0 + h) = (1/c0) sum_k (-h/c0)^k
  std::vector<Complex> d(a.order() + 1);
  Complex p = Complex(1.0) / c0;
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = p;
    p = -p / c0;
  }
  return Jet::elementary(a, d);
}

Jet operator/(const Jet& a, const Jet& b) {
  if (!a.layout_ && !b.layout_) {
    if (b.value_ == Complex(0.0)) throw DomainError("division by zero constant");
    return Jet(a.value_ / b.value_);
  }
  return a * inverse(b);
}

Jet pow(const Jet& a, int k) {
  if (k < 0) return pow(inverse(a), -k);
  Jet result(1.0);
  Jet base = a;
  int e = k;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = (e >>= 1) > 0 ? base * base : base;
  }
  if (a.layout_ && !result.layout()) result = Jet::constant(a.layout_, result.value());
  return result;
}

Jet derivative(const Jet& a, int var) {
  if (!a.layout_) return Jet(0.0);
  const JetLayout& L = *a.layout_;
  if (var < 0 || var >= L.num_vars())
    throw StructuralError("derivative: variable index out of range");
  Jet r = Jet::constant(a.layout_, 0.0);
  for (int i = 0; i < L.size(); ++i) {
    const int e = L.exponent(i, var);
    if (e == 0 || a.coeffs_[i] == Complex(0.0)) continue;
    const int target = L.position(L.packed(i) - (std::uint64_t(1) << (8 * var)));
    r.coeffs_[target] += static_cast<double>(e) * a.coeffs_[i];
  }
  return r;
}

bool operator==(const Jet& a, const Jet& b) {
  if (!a.layout_ && !b.layout_) return a.value_ == b.value_;
  if (!a.layout_) return Jet::constant(b.layout_, a.value_) == b;
  if (!b.layout_) return a == Jet::constant(a.layout_, b.value_);
  if (a.layout_->num_vars() != b.layout_->num_vars() ||
      a.layout_->order() != b.layout_->order())
    return false;
  return a.coeffs_ == b.coeffs_;
}

double max_coeff_distance(const Jet& a, const Jet& b) {
  if (a.num_vars() != b.num_vars() || a.order() != b.order()) {
    if (a.is_constant() || b.is_constant()) {
      const Jet& shaped = a.is_constant() ? b : a;
      const Jet& flat = a.is_constant() ? a : b;
      return max_coeff_distance(Jet::constant(shaped.layout(), flat.value()), shaped);
    }
    return std::numeric_limits<double>::infinity();
  }
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.coeff(i) - b.coeff(i)));
  return m;
}

}  // namespace hklab
