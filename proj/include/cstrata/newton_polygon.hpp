#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace cstrata {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& q);
/// Accepts "n", "n/d" and surrounding whitespace; InvalidInput otherwise.
Rational parse_rational(const std::string& text);

struct BreakPoint {
  int a = 0;
  std::int64_t b = 0;

  friend bool operator==(const BreakPoint&, const BreakPoint&) = default;
  friend auto operator<=>(const BreakPoint&, const BreakPoint&) = default;
};

/// Sorted multiset of nonnegative rational slopes whose vertices all have
/// integer coordinates. Rank 0 (no slopes) is allowed.
class NewtonPolygon {
 public:
  NewtonPolygon() = default;

  /// Sorts and validates; NonIntegralBreakPoint names the offending vertex.
  static NewtonPolygon from_slopes(std::vector<Rational> slopes);
  static NewtonPolygon from_integers(const std::vector<std::int64_t>& slopes);

  const std::vector<Rational>& slopes() const { return slopes_; }
  int rank() const { return static_cast<int>(slopes_.size()); }
  /// nu(r), always an integer.
  std::int64_t height() const;
  /// nu(i) for integer 0 <= i <= r.
  Rational value_at(int i) const;
  int multiplicity(const Rational& slope) const;
  bool integral() const;

  std::string str() const;

  friend bool operator==(const NewtonPolygon&, const NewtonPolygon&) = default;
  friend bool operator<(const NewtonPolygon& a, const NewtonPolygon& b) { return a.slopes_ < b.slopes_; }

 private:
  std::vector<Rational> slopes_;
};

/// Comma-separated slopes, optionally in braces: "{0,1/2,1/2}" or "0,1".
NewtonPolygon parse_polygon(const std::string& text);

/// Endpoints plus every abscissa where the slope strictly increases.
std::vector<BreakPoint> break_points(const NewtonPolygon& nu);

/// Pointwise comparison at every integer abscissa; RankMismatch on rank mismatch.
bool lies_above(const NewtonPolygon& nu, const NewtonPolygon& nu0);

inline constexpr std::size_t kMaxExteriorRank = 200000;

/// Multiset of all a-element subset sums; BadIndex unless 1 <= a <= r.
NewtonPolygon exterior_power(const NewtonPolygon& nu, int a);

bool has_break(const NewtonPolygon& nu, const BreakPoint& bp);

/// Every slope multiplied by q.
NewtonPolygon scale_iterate(const NewtonPolygon& nu, std::int64_t q);

/// Slopes {b, b+1 (r-2 times), d - b - (r-2)(b+1)}; Infeasible if the last slope
/// would drop below b+1 or r < 2.
NewtonPolygon nu1(int r, std::int64_t b, std::int64_t d);

/// Slopes {b+1 (r-1 times), d - (r-1)(b+1)}; Infeasible if r(b+1) > d.
NewtonPolygon nu2(int r, std::int64_t b, std::int64_t d);

/// Membership of nu_x in T_{(1,b)} decided as "above nu1 but not above nu2".
/// When r(b+1) > d every polygon above nu1 is nu1 itself and the answer is true.
/// PreconditionViolated if nu_x is not integral, has rank < 2, or is not above nu1.
bool t_membership_via_nu(const NewtonPolygon& nu_x, std::int64_t b);

}  // namespace cstrata
