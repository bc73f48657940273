#pragma once

#include <climits>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cstrata/detail/modular.hpp"
#include "cstrata/field_tower.hpp"

namespace cstrata {

/// p-adic valuation with an explicit infinity for elements that vanish at the
/// working precision. Never silently equal to s.
class Valuation {
 public:
  static constexpr int kInfinite = INT_MAX;

  constexpr Valuation() = default;
  constexpr explicit Valuation(int v) : v_(v) {}
  static constexpr Valuation infinite() { return Valuation(); }

  constexpr bool finite() const { return v_ != kInfinite; }
  constexpr bool is_infinite() const { return v_ == kInfinite; }
  /// Finite value; throws PreconditionViolated on the sentinel.
  int value() const;

  friend constexpr bool operator==(Valuation a, Valuation b) { return a.v_ == b.v_; }
  friend constexpr bool operator!=(Valuation a, Valuation b) { return a.v_ != b.v_; }
  friend constexpr bool operator<(Valuation a, Valuation b) { return a.v_ < b.v_; }
  friend constexpr bool operator<=(Valuation a, Valuation b) { return a.v_ <= b.v_; }
  friend constexpr bool operator>(Valuation a, Valuation b) { return a.v_ > b.v_; }
  friend constexpr bool operator>=(Valuation a, Valuation b) { return a.v_ >= b.v_; }
  friend constexpr Valuation operator+(Valuation a, Valuation b) {
    return (a.finite() && b.finite()) ? Valuation(a.v_ + b.v_) : Valuation();
  }

  std::string str() const { return finite() ? std::to_string(v_) : "inf"; }

 private:
  int v_ = kInfinite;
};

class WittRing;
class WittElement;
using WittRingPtr = std::shared_ptr<const WittRing>;

/// Element of W_s(F_{p^deg}) = (Z/p^s)[X]/(f~).
class WittElement {
 public:
  WittElement() = default;
  WittElement(const WittRing* ring, const detail::Coeffs& c) : ring_(ring), c_(c) {}

  const WittRing& ring() const { return *ring_; }
  const WittRing* ring_ptr() const { return ring_; }
  const detail::Coeffs& coeffs() const { return c_; }
  u64 coeff(int i) const { return c_[i]; }

  bool is_zero() const;
  bool is_one() const;
  Valuation valuation() const;
  bool is_unit() const { return valuation() == Valuation(0); }

  WittElement operator+(const WittElement& o) const;
  WittElement operator-(const WittElement& o) const;
  WittElement operator-() const;
  WittElement operator*(const WittElement& o) const;
  WittElement& operator+=(const WittElement& o) { return *this = *this + o; }
  WittElement& operator-=(const WittElement& o) { return *this = *this - o; }
  WittElement& operator*=(const WittElement& o) { return *this = *this * o; }
  WittElement scaled(std::int64_t k) const;
  WittElement pow(u64 e) const;
  /// Inverse of a unit; PreconditionViolated otherwise.
  WittElement inverse() const;
  /// y with p^v y = x, defined modulo p^{s-v}; requires v <= valuation.
  WittElement divide_p_power(int v) const;
  /// p^v x.
  WittElement times_p_power(int v) const;

  friend bool operator==(const WittElement& a, const WittElement& b);
  friend bool operator!=(const WittElement& a, const WittElement& b) { return !(a == b); }

 private:
  const WittRing* ring_ = nullptr;
  detail::Coeffs c_{};
};

class WittRing {
 public:
  WittRing(FieldPtr field, int s);

  const FieldPtr& field() const { return field_; }
  u64 p() const { return field_->p(); }
  int deg() const { return field_->deg(); }
  int s() const { return s_; }
  /// p^s.
  u64 modulus() const { return arith_.mod().value(); }
  const detail::PolyQuotient& arith() const { return arith_; }
  const std::vector<u64>& lifted_poly() const { return arith_.modulus_poly(); }
  const WittElement& frobenius_image() const { return frob_image_; }

  WittElement zero() const;
  WittElement one() const;
  WittElement generator() const;
  WittElement from_int(std::int64_t v) const;
  /// Residues are reduced mod p^s; at most deg entries.
  WittElement from_coeffs(const std::vector<u64>& c) const;
  WittElement p_power(int v) const;

  /// k-th power of the Frobenius automorphism.
  WittElement frobenius(const WittElement& x, u64 k) const;
  FFElem reduce(const WittElement& x) const;
  /// Coefficient-wise lift of residues to [0, p).
  WittElement lift(const FFElem& x) const;
  WittElement teichmuller(const FFElem& c) const;

  /// Same field at another precision (interned).
  const WittRing& with_precision(int s) const;
  /// Reinterpret residues as exact integers in a ring of the same field.
  WittElement change_precision(const WittElement& x, const WittRing& target) const;

  std::string describe() const;

 private:
  FieldPtr field_;
  int s_;
  detail::PolyQuotient arith_;
  WittElement frob_image_;
  // frob_cols_[k][i] = sigma^k(X^i), k = 0..deg-1.
  std::vector<std::vector<detail::Coeffs>> frob_cols_;
};

/// Interned ring; the returned reference stays valid for the process lifetime.
const WittRing& witt_ring(const FieldPtr& field, int s);

/// Root of the source's lifted polynomial in the target ring, Hensel-lifted from
/// the canonical field embedding. Targets must share p and s.
struct WittEmbedding {
  const WittRing* source = nullptr;
  const WittRing* target = nullptr;
  WittElement image_of_generator;
};

WittEmbedding make_witt_embedding(const WittRing& source, const WittRing& target);
WittElement embed(const WittEmbedding& e, const WittElement& x);

// ---- coordinate-wise backend over the prime field ----

/// Sparse integer polynomial in 2s variables (x_0..x_{s-1}, y_0..y_{s-1}) with
/// coefficients reduced mod p.
struct WittPolynomial {
  struct Term {
    std::vector<std::uint16_t> exponents;
    u64 coeff;
  };
  std::vector<Term> terms;
};

struct WittTables {
  u64 p = 0;
  int s = 0;
  std::vector<WittPolynomial> sum;      // S_0..S_{s-1}
  std::vector<WittPolynomial> product;  // P_0..P_{s-1}
};

/// Same recursion carried out modulo x_i^p = x_i, y_i^p = y_i: the functions
/// the tables induce on Teichmueller representatives of F_p. Used for fast
/// evaluation; exponents stay below p.
const WittTables& generic_witt_ops_on_prime_field(u64 p, int s);

inline constexpr int kMaxGenericPrecision = 6;

/// Universal Witt sum/product polynomials from the ghost recursion, cached per
/// (p, s). PrecisionTooLarge above kMaxGenericPrecision or when exponents
/// p^{s-1} exceed the packed-monomial width.
const WittTables& generic_witt_ops(u64 p, int s);

class GenericWittVector {
 public:
  GenericWittVector(u64 p, std::vector<u64> components);

  u64 p() const { return p_; }
  int s() const { return static_cast<int>(comp_.size()); }
  const std::vector<u64>& components() const { return comp_; }

  GenericWittVector operator+(const GenericWittVector& o) const;
  GenericWittVector operator*(const GenericWittVector& o) const;
  friend bool operator==(const GenericWittVector& a, const GenericWittVector& b) {
    return a.p_ == b.p_ && a.comp_ == b.comp_;
  }

  /// sum_i p^i [a_i] in Z/p^s.
  u64 to_integer() const;
  static GenericWittVector from_integer(u64 p, int s, u64 n);

 private:
  u64 p_;
  std::vector<u64> comp_;
};

struct BackendReport {
  u64 p = 0;
  int s = 0;
  std::size_t trials = 0;
  std::vector<std::string> mismatches;
};

/// Random pairs added and multiplied in both backends; mismatches listed.
/// With `strict`, the first mismatch throws BackendMismatch instead.
BackendReport crosscheck_backends(u64 p, int s, std::size_t trials, u64 seed, bool strict = false);

}  // namespace cstrata
