#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace cstrata::detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Residues mod m for 2 <= m < 2^62. Powers of two take a mask path so that the
// p = 2 sweeps never touch 128-bit division.
class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(u64 m) : m_(m), mask_(m - 1), pow2_((m & (m - 1)) == 0), small_(m < (u64{1} << 32)) {}

  u64 value() const { return m_; }
  bool is_pow2() const { return pow2_; }

  u64 reduce(u64 a) const { return pow2_ ? (a & mask_) : a % m_; }
  u64 reduce_signed(std::int64_t a) const {
    if (a >= 0) return reduce(static_cast<u64>(a));
    u64 r = reduce(static_cast<u64>(-(a + 1)) + 1);
    return r == 0 ? 0 : m_ - r;
  }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= m_ ? s - m_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (m_ - b); }
  u64 neg(u64 a) const { return a == 0 ? 0 : m_ - a; }
  u64 mul(u64 a, u64 b) const {
    if (pow2_) return (a * b) & mask_;
    if (small_) return (a * b) % m_;
    return static_cast<u64>(static_cast<u128>(a) * b % m_);
  }
  u64 pow(u64 a, u64 e) const {
    u64 r = reduce(1);
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

 private:
  u64 m_ = 2;
  u64 mask_ = 1;
  bool pow2_ = true;
  bool small_ = true;
};

inline constexpr int kMaxDegree = 32;
using Coeffs = std::array<u64, kMaxDegree>;

// (Z/m)[X]/(f) for a monic f of degree <= kMaxDegree. Shared by the finite
// field layer (m = p) and the unramified Witt layer (m = p^s).
class PolyQuotient {
 public:
  PolyQuotient() = default;
  PolyQuotient(Modulus mod, const std::vector<u64>& monic);

  int degree() const { return deg_; }
  const Modulus& mod() const { return mod_; }
  const std::vector<u64>& modulus_poly() const { return f_; }

  void add(const Coeffs& a, const Coeffs& b, Coeffs& out) const;
  void sub(const Coeffs& a, const Coeffs& b, Coeffs& out) const;
  void neg(const Coeffs& a, Coeffs& out) const;
  void scale(const Coeffs& a, u64 k, Coeffs& out) const;
  void mul(const Coeffs& a, const Coeffs& b, Coeffs& out) const;
  // Evaluates the integer polynomial `poly` (low-to-high) at the ring element y.
  void eval_poly(const std::vector<u64>& poly, const Coeffs& y, Coeffs& out) const;

 private:
  Modulus mod_;
  int deg_ = 0;
  std::vector<u64> f_;
  std::vector<u64> neg_f_;
};

inline bool coeffs_equal(const Coeffs& a, const Coeffs& b, int deg) {
  for (int i = 0; i < deg; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

inline bool coeffs_zero(const Coeffs& a, int deg) {
  for (int i = 0; i < deg; ++i)
    if (a[i] != 0) return false;
  return true;
}

}  // namespace cstrata::detail
