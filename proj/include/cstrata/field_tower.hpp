#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cstrata/detail/modular.hpp"

namespace cstrata {

using detail::u64;

class FiniteField;
using FieldPtr = std::shared_ptr<const FiniteField>;

inline constexpr u64 kDefaultEnumerationCap = u64{1} << 20;

/// Element of F_{p^deg} = F_p[X]/(defining_poly), stored as deg residues mod p
/// (low-to-high powers of X). Holds a non-owning pointer to its field; fields
/// are interned by make_field/field_from_poly and live for the whole process.
class FFElem {
 public:
  FFElem() = default;
  FFElem(const FiniteField* field, const detail::Coeffs& c) : field_(field), c_(c) {}

  const FiniteField& field() const { return *field_; }
  const FiniteField* field_ptr() const { return field_; }
  const detail::Coeffs& coeffs() const { return c_; }
  u64 coeff(int i) const { return c_[i]; }

  bool is_zero() const;
  bool is_one() const;
  /// Position in the deterministic enumeration order: sum of c_i p^i.
  u64 index() const;

  FFElem operator+(const FFElem& o) const;
  FFElem operator-(const FFElem& o) const;
  FFElem operator-() const;
  FFElem operator*(const FFElem& o) const;
  FFElem& operator+=(const FFElem& o) { return *this = *this + o; }
  FFElem& operator-=(const FFElem& o) { return *this = *this - o; }
  FFElem& operator*=(const FFElem& o) { return *this = *this * o; }
  FFElem scaled(u64 k) const;
  FFElem pow(u64 e) const;
  /// Multiplicative inverse; throws PreconditionViolated on zero.
  FFElem inverse() const;

  friend bool operator==(const FFElem& a, const FFElem& b);
  friend bool operator!=(const FFElem& a, const FFElem& b) { return !(a == b); }

 private:
  const FiniteField* field_ = nullptr;
  detail::Coeffs c_{};
};

/// Total order matching the enumeration order (compares top coefficient first).
bool enumeration_less(const FFElem& a, const FFElem& b);

class FiniteField {
 public:
  FiniteField(u64 p, std::vector<u64> defining_poly);

  u64 p() const { return p_; }
  int deg() const { return deg_; }
  const std::vector<u64>& defining_poly() const { return poly_; }
  /// p^deg, or 0 when it does not fit in 64 bits.
  u64 cardinality() const { return card_; }
  const detail::PolyQuotient& arith() const { return arith_; }

  FFElem zero() const;
  FFElem one() const;
  FFElem generator() const;
  FFElem from_int(u64 v) const;
  FFElem from_coeffs(const std::vector<u64>& c) const;
  FFElem from_index(u64 index) const;

  /// x -> x^p as an F_p-linear map, applied to coefficient vectors.
  FFElem frobenius_once(const FFElem& x) const;

  std::string describe() const;

 private:
  u64 p_;
  int deg_;
  std::vector<u64> poly_;
  u64 card_;
  detail::PolyQuotient arith_;
  std::vector<detail::Coeffs> frob_cols_;
};

bool is_prime(u64 n);

/// Rabin test: gcd(x^{p^i} - x, f) = 1 for i < deg and x^{p^deg} = x mod f.
bool is_irreducible(u64 p, const std::vector<u64>& monic_poly);

/// Deterministic seeded search for an irreducible monic polynomial of degree
/// `deg`. Seed 0 scans monic polynomials in lexicographic order of their
/// lower coefficients; degree 1 always yields the polynomial x.
FieldPtr make_field(u64 p, int deg, u64 seed = 0);

/// Field with a caller-supplied defining polynomial (verified irreducible).
FieldPtr field_from_poly(u64 p, const std::vector<u64>& defining_poly);

/// The interned handle of a field obtained from an element's field pointer.
FieldPtr shared_field(const FiniteField& field);

/// x^{p^k}.
FFElem frobenius(const FFElem& x, u64 k);

struct Embedding {
  FieldPtr source;
  FieldPtr target;
  FFElem image_of_generator;
};

/// Canonical embedding: the generator goes to the least root (in enumeration
/// order) of source's defining polynomial inside target.
Embedding make_embedding(const FieldPtr& source, const FieldPtr& target,
                         u64 scan_cap = kDefaultEnumerationCap);

FFElem embed(const Embedding& e, const FFElem& x);

/// All p^deg elements in index order; TooLarge above `cap`.
std::vector<FFElem> enumerate(const FiniteField& field, u64 cap = kDefaultEnumerationCap);

}  // namespace cstrata
