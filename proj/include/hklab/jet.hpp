#pragma once

// Truncated multivariate power series ("jets") over complex doubles.
//
// A Jet stores the Taylor coefficients of a holomorphic function of
// `num_vars` variables, truncated at total degree `order`, densely indexed by
// graded-lexicographic multi-index.  Jets with num_vars == 0 are plain
// constants and promote to any shape on contact, so scalars and jets mix
// freely in templated code (the geodesic integrators run unchanged on
// std::complex<double> and on Jet).

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "hklab/errors.hpp"

namespace hklab {

using Complex = std::complex<double>;

// Monomial bookkeeping shared by all jets of one shape.  Multi-indices are
// packed 8 bits per variable into a uint64, so num_vars <= 8 and exponents
// stay below 128; total degree is capped well below that by `order`.
class JetLayout {
 public:
  static constexpr int kMaxVars = 8;
  static constexpr int kMaxOrder = 20;

  static std::shared_ptr<const JetLayout> get(int num_vars, int order);

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(packed_.size()); }

  int degree(int idx) const { return degree_[idx]; }
  // Index one past the last monomial of total degree <= d.
  int degree_end(int d) const { return degree_end_[d]; }
  std::uint64_t packed(int idx) const { return packed_[idx]; }
  int exponent(int idx, int var) const {
    return static_cast<int>((packed_[idx] >> (8 * var)) & 0xff);
  }
  int position(std::uint64_t packed) const {
    auto it = position_.find(packed);
    return it == position_.end() ? -1 : it->second;
  }
  // Position of the sum of two stored monomials; valid whenever the degrees
  // fit (8-bit lanes cannot carry at the orders we allow).
  int product_position(int i, int j) const {
    if (!product_.empty()) return product_[static_cast<std::size_t>(i) * packed_.size() + j];
    return position(packed_[i] + packed_[j]);
  }
  int variable_position(int var) const { return var_position_[var]; }

 private:
  JetLayout(int num_vars, int order);

  int num_vars_, order_;
  std::vector<std::uint64_t> packed_;
  std::vector<std::uint8_t> degree_;
  std::vector<int> degree_end_;
  std::vector<int> var_position_;
  std::vector<int> product_;  // dense product table for small layouts
  std::unordered_map<std::uint64_t, int> position_;
};

class Jet {
 public:
  // Constants: shapeless until combined with a shaped jet.
  Jet() : value_(0.0) {}
  Jet(double v) : value_(v) {}                       // NOLINT(runtime/explicit)
  Jet(const Complex& v) : value_(v) {}               // NOLINT(runtime/explicit)

  static Jet constant(std::shared_ptr<const JetLayout> layout, const Complex& v) {
    Jet j;
    j.layout_ = std::move(layout);
    j.coeffs_.assign(j.layout_->size(), Complex(0.0));
    j.coeffs_[0] = v;
    return j;
  }
  // value + 1 * eps_var
  static Jet variable(std::shared_ptr<const JetLayout> layout, const Complex& value, int var);
  // value + sum_k gradient[k] * eps_k
  static Jet linear(std::shared_ptr<const JetLayout> layout, const Complex& value,
                    std::span<const Complex> gradient);

  bool is_constant() const { return layout_ == nullptr; }
  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  int num_vars() const { return layout_ ? layout_->num_vars() : 0; }
  int order() const { return layout_ ? layout_->order() : 0; }

  // Constant (degree-0) term.
  Complex value() const { return layout_ ? coeffs_[0] : value_; }
  // Coefficient of eps_var.
  Complex coeff_linear(int var) const {
    return layout_ ? coeffs_[layout_->variable_position(var)] : Complex(0.0);
  }
  Complex coeff(int idx) const { return layout_ ? coeffs_[idx] : (idx == 0 ? value_ : Complex(0.0)); }
  Complex& coeff_ref(int idx) { return coeffs_[idx]; }
  int size() const { return layout_ ? layout_->size() : 1; }

  double max_abs_coeff() const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs) { *this = *this * rhs; return *this; }
  Jet& operator/=(const Jet& rhs) { *this = *this / rhs; return *this; }

  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator-(const Jet& a);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend bool operator==(const Jet& a, const Jet& b);
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet inverse(const Jet& a);       // 1/a, needs nonzero constant term
  friend Jet pow(const Jet& a, int k);

  friend Jet derivative(const Jet& a, int var);

 private:
  // Promote a constant to the shape of `like`.
  Jet promoted(const Jet& like) const {
    return constant(like.layout_, value_);
  }
  static void require_same_shape(const Jet& a, const Jet& b);
  // a evaluated as power series of its nilpotent part composed with the
  // series whose k-th Taylor coefficient (at a's constant term) is derivs[k]/k!.
  static Jet elementary(const Jet& a, const std::vector<Complex>& derivs_over_factorial);

  std::shared_ptr<const JetLayout> layout_;  // null => constant
  std::vector<Complex> coeffs_;
  Complex value_;  // used only when layout_ == nullptr
};

// max |coeff difference|; infinity on shape mismatch
double max_coeff_distance(const Jet& a, const Jet& b);

inline double leading_abs(const Complex& c) { return std::abs(c); }
inline double leading_abs(const Jet& j) { return std::abs(j.value()); }
inline double leading_im_abs(const Complex& c) { return std::abs(c.imag()); }
inline double leading_im_abs(const Jet& j) { return std::abs(j.value().imag()); }
inline double leading_re(const Complex& c) { return c.real(); }
inline double leading_re(const Jet& j) { return j.value().real(); }

// Promote a complex number to scalar type S (identity for Complex, constant jet for Jet).
template <class S>
inline S scalar_from(const Complex& z) { return S(z); }

}  // namespace hklab

namespace Eigen {

// Enough of NumTraits for coefficient-wise vector arithmetic on jets.  Jets
// never enter decompositions or norms; the integrators only add and scale.
template <>
struct NumTraits<hklab::Jet> {
  using Self = hklab::Jet;
  using Real = hklab::Jet;
  using NonInteger = hklab::Jet;
  using Literal = hklab::Jet;
  using Nested = hklab::Jet;
  // IsComplex stays 0: Eigen's complex-specific paths (conjugation in
  // products, adjoints) are never used on jet-valued vectors, and flagging
  // the type complex makes Real == Self, which collides with Eigen's
  // ScalarBinaryOpTraits specializations.
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 32,
    MulCost = 256
  };
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen

namespace hklab {
template <class Scalar>
using VecX = Eigen::Vector<Scalar, Eigen::Dynamic>;
using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXd = Eigen::MatrixXd;
using MatrixXcd = Eigen::MatrixXcd;
}  // namespace hklab
