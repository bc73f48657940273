#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cstrata/linalg.hpp"
#include "cstrata/newton_polygon.hpp"
#include "cstrata/witt_ring.hpp"

namespace cstrata {

/// A sigma^n-linear Frobenius phi(v) = A sigma^n(v) on W_s(F_{p^deg})^r.
///
/// `exact_lift` marks matrices whose residues are the exact integers of the
/// crystal (user input, catalog families). Such crystals are re-lifted to a
/// higher precision on demand; derived crystals are only known modulo p^s.
class Crystal {
 public:
  Crystal() = default;
  Crystal(int n, WittMatrix matrix, bool exact_lift = true);

  u64 p() const { return matrix_.ring().p(); }
  int n() const { return n_; }
  const WittRing& ring() const { return matrix_.ring(); }
  int s() const { return matrix_.ring().s(); }
  int rank() const { return matrix_.rows(); }
  const WittMatrix& matrix() const { return matrix_; }
  bool exact_lift() const { return exact_; }
  /// Least e with sigma^{ne} = id on the residue field: deg / gcd(n, deg).
  int linearization_exponent() const;

  /// Re-lift (exact crystals) or reduce to precision s.
  Crystal at_precision(int s) const;

  std::string describe() const;

 private:
  int n_ = 1;
  WittMatrix matrix_;
  bool exact_ = true;
};

struct HodgePolygon {
  std::vector<int> slopes;
  friend bool operator==(const HodgePolygon&, const HodgePolygon&) = default;
  NewtonPolygon as_polygon() const;
};

/// Invariant factors p^{a_i} (a_i >= 1) of a finite abelian p-group.
struct HomGroup {
  std::vector<int> exponents;
  int log_order() const;
};

/// Largest s with p^s < 2^62.
int max_precision(u64 p);

Crystal slope_line_crystal(std::int64_t b, const WittRing& ring, int n);

/// B = A sigma^n(A) ... sigma^{(e-1)n}(A).
WittMatrix linearize(const Crystal& c);

/// v_p(det A); exact crystals are re-lifted (doubling) until the determinant is
/// resolved. NotIsogeny if it vanishes at the largest usable precision,
/// PrecisionTooSmall for derived crystals.
int det_valuation(const Crystal& c);

struct NewtonData {
  NewtonPolygon polygon;
  int e = 1;
  int det_valuation = 0;
  int precision = 0;  // precision at which the hull was certified
  std::vector<Valuation> charpoly_valuations;  // v(c_i), low-to-high, of the linearization
};

/// Lower convex hull of (k, v(c_{r-k})) of the linearization, slopes divided by
/// e; certified because every hull height is at most e*d < s.
NewtonData newton_data(const Crystal& c);
NewtonPolygon newton_slopes(const Crystal& c);

/// Elementary-divisor exponents; PrecisionTooSmall if some are unresolved.
HodgePolygon hodge_polygon(const Crystal& c);

bool divisible_by(const Crystal& c, int b);

/// Rank of the stable image of the mod-p iterates M_1 = A, M_{q+1} = A sigma^n(M_q).
int p_rank_stable(const Crystal& c);

inline constexpr int kMaxCompoundRank = 70;

Crystal exterior_power_crystal(const Crystal& c, int a);
Crystal iterate_crystal(const Crystal& c, int q);
Crystal direct_sum(const Crystal& a, const Crystal& b);

struct SlopeSplitting {
  Crystal slope_b;  // Newton and Hodge slopes all equal to b
  Crystal higher;   // Newton slopes > b
  WittMatrix basis;  // columns: basis of the slope-b summand, then of the complement
};

/// Fitting decomposition of psi = A / p^b. NoSplit unless every entry of A is
/// divisible by p^b; PrecisionTooSmall if the stable image and kernel do not
/// span at precision s.
SlopeSplitting slope_splitting(const Crystal& c, int b);

/// Solutions v of A sigma^n(v) = p^b v in W_s^r, via the Smith form of the
/// Z/p^s-linear map on the r*deg coordinates.
HomGroup hom_group(const Crystal& c, int b);

}  // namespace cstrata
