#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "cstrata/crystal.hpp"
#include "cstrata/error.hpp"

using namespace cstrata;

namespace {

NewtonPolygon poly(std::initializer_list<const char*> s) {
  std::vector<Rational> q;
  for (const char* x : s) q.push_back(parse_rational(x));
  return NewtonPolygon::from_slopes(q);
}

WittMatrix mat(const WittRing& R, const std::vector<std::vector<std::int64_t>>& rows) {
  WittMatrix m(R, static_cast<int>(rows.size()), static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = R.from_int(rows[i][j]);
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

WittMatrix random_matrix(const WittRing& R, int r, std::mt19937_64& rng, int max_shift) {
  WittMatrix m(R, r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      std::vector<u64> c(R.deg());
      for (auto& x : c) x = rng() % R.modulus();
      m(i, j) = R.from_coeffs(c).times_p_power(static_cast<int>(rng() % (max_shift + 1)));
    }
  return m;
}

WittElement laplace_det(const WittMatrix& m) {
  const int n = m.rows();
  if (n == 0) return m.ring().one();
  if (n == 1) return m(0, 0);
  WittElement acc = m.ring().zero();
  for (int j = 0; j < n; ++j) {
    WittMatrix minor(m.ring(), n - 1, n - 1);
    for (int i = 1; i < n; ++i)
      for (int k = 0, kk = 0; k < n; ++k)
        if (k != j) minor(i - 1, kk++) = m(i, k);
    WittElement term = m(0, j) * laplace_det(minor);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

TEST(Crystal, SlopeLineCrystals) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  EXPECT_EQ(newton_slopes(slope_line_crystal(0, R, 1)), poly({"0"}));
  auto e1 = slope_line_crystal(1, R, 1);
  EXPECT_EQ(newton_slopes(e1), poly({"1"}));
  EXPECT_EQ(hodge_polygon(e1).slopes, std::vector<int>{1});
  const WittRing& R2 = witt_ring(make_field(2, 1), 2);
  EXPECT_EQ(kind_of([&] { slope_line_crystal(2, R2, 1); }), ErrorKind::PrecisionTooSmall);
}

TEST(Crystal, LinearizationExponent) {
  const WittRing& R1 = witt_ring(make_field(2, 1), 3);
  const WittRing& R2 = witt_ring(make_field(2, 2), 3);
  EXPECT_EQ(Crystal(1, mat(R1, {{1, 0}, {0, 2}})).linearization_exponent(), 1);
  EXPECT_EQ(Crystal(1, mat(R2, {{1, 0}, {0, 2}})).linearization_exponent(), 2);
  EXPECT_EQ(Crystal(2, mat(R2, {{1, 0}, {0, 2}})).linearization_exponent(), 1);
  Crystal c(2, mat(R2, {{0, 1}, {2, 0}}));
  EXPECT_EQ(linearize(c), c.matrix());
}

TEST(Crystal, NewtonExamples) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  EXPECT_EQ(newton_slopes(Crystal(1, mat(R, {{1, 0}, {0, 2}}))), poly({"0", "1"}));
  EXPECT_EQ(newton_slopes(Crystal(1, mat(R, {{0, 2}, {1, 0}}))), poly({"1/2", "1/2"}));
  const WittRing& R4 = witt_ring(make_field(2, 2), 3);
  Crystal c(1, mat(R4, {{0, 1}, {2, 0}}));
  EXPECT_EQ(linearize(c), mat(R4, {{2, 0}, {0, 2}}));
  EXPECT_EQ(newton_slopes(c), poly({"1/2", "1/2"}));
}

TEST(Crystal, ExactCrystalsAreRelifted) {
  // det = -4 vanishes modulo 2^2; the Newton polygon still comes out exactly.
  const WittRing& R = witt_ring(make_field(2, 1), 2);
  Crystal c(1, mat(R, {{0, 2}, {2, 0}}));
  auto nd = newton_data(c);
  EXPECT_EQ(nd.polygon, poly({"1", "1"}));
  EXPECT_GT(nd.precision, 2);
  EXPECT_EQ(det_valuation(c), 2);
  // The same matrix marked as derived data cannot be resolved.
  Crystal derived(1, c.matrix(), false);
  EXPECT_EQ(kind_of([&] { newton_slopes(derived); }), ErrorKind::PrecisionTooSmall);
  Crystal zero(1, mat(R, {{0, 0}, {0, 1}}));
  EXPECT_EQ(kind_of([&] { newton_slopes(zero); }), ErrorKind::NotIsogeny);
}

TEST(Crystal, HodgeAndDivisibility) {
  const WittRing& R = witt_ring(make_field(3, 1), 3);
  Crystal a(1, mat(R, {{1, 0}, {0, 3}}));
  Crystal b(1, mat(R, {{0, 3}, {1, 0}}));
  Crystal c(1, mat(R, {{3, 0}, {0, 3}}));
  EXPECT_EQ(hodge_polygon(a).slopes, (std::vector<int>{0, 1}));
  EXPECT_EQ(hodge_polygon(b).slopes, (std::vector<int>{0, 1}));
  EXPECT_EQ(hodge_polygon(c).slopes, (std::vector<int>{1, 1}));
  EXPECT_TRUE(divisible_by(a, 0));
  EXPECT_TRUE(divisible_by(c, 1));
  EXPECT_FALSE(divisible_by(a, 1));
}

TEST(Crystal, PRankExamples) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  EXPECT_EQ(p_rank_stable(Crystal(1, mat(R, {{1, 0}, {0, 2}}))), 1);
  EXPECT_EQ(p_rank_stable(Crystal(1, mat(R, {{0, 2}, {1, 0}}))), 0);
  EXPECT_EQ(p_rank_stable(Crystal(1, mat(R, {{1, 1}, {0, 2}}))), 1);
}

TEST(Crystal, ExteriorPowers) {
  const WittRing& R = witt_ring(make_field(2, 1), 8);
  Crystal c(1, mat(R, {{1, 0, 0}, {0, 2, 0}, {0, 0, 4}}));
  EXPECT_EQ(exterior_power_crystal(c, 1).matrix(), c.matrix());
  Crystal w2 = exterior_power_crystal(c, 2);
  EXPECT_EQ(w2.matrix(), mat(R, {{2, 0, 0}, {0, 4, 0}, {0, 0, 8}}));
  EXPECT_EQ(newton_slopes(w2), poly({"1", "2", "3"}));
  Crystal w3 = exterior_power_crystal(c, 3);
  EXPECT_EQ(w3.rank(), 1);
  EXPECT_EQ(newton_slopes(w3), poly({"3"}));
  const WittRing& R9 = witt_ring(make_field(2, 1), 3);
  Crystal big(1, WittMatrix::identity(R9, 9));
  EXPECT_EQ(kind_of([&] { exterior_power_crystal(big, 4); }), ErrorKind::RankCapExceeded);
}

TEST(Crystal, Iterates) {
  const WittRing& R = witt_ring(make_field(2, 1), 6);
  Crystal c(1, mat(R, {{0, 2}, {1, 0}}));
  EXPECT_EQ(iterate_crystal(c, 1).matrix(), c.matrix());
  Crystal c2 = iterate_crystal(c, 2);
  EXPECT_EQ(c2.matrix(), mat(R, {{2, 0}, {0, 2}}));
  EXPECT_EQ(c2.n(), 2);
  EXPECT_EQ(newton_slopes(c2), poly({"1", "1"}));
  Crystal d(1, mat(R, {{1, 0}, {0, 2}}));
  EXPECT_EQ(iterate_crystal(d, 3).matrix(), mat(R, {{1, 0}, {0, 8}}));
}

TEST(Crystal, DirectSums) {
  const WittRing& R = witt_ring(make_field(2, 1), 4);
  Crystal e0 = slope_line_crystal(0, R, 1), e1 = slope_line_crystal(1, R, 1);
  EXPECT_EQ(newton_slopes(direct_sum(e1, e1)), poly({"1", "1"}));
  Crystal ss(1, mat(R, {{0, 2}, {1, 0}}));
  EXPECT_EQ(newton_slopes(direct_sum(ss, e0)), poly({"0", "1/2", "1/2"}));
  const WittRing& R5 = witt_ring(make_field(2, 1), 5);
  EXPECT_EQ(kind_of([&] { direct_sum(e0, slope_line_crystal(0, R5, 1)); }), ErrorKind::RingMismatch);
}

TEST(Crystal, SlopeSplittingExamples) {
  const WittRing& R = witt_ring(make_field(2, 1), 5);
  auto diag = slope_splitting(Crystal(1, mat(R, {{1, 0}, {0, 2}})), 0);
  EXPECT_EQ(diag.slope_b.rank(), 1);
  EXPECT_EQ(diag.higher.rank(), 1);
  auto tri = slope_splitting(Crystal(1, mat(R, {{1, 1}, {0, 2}})), 0);
  ASSERT_EQ(tri.slope_b.rank(), 1);
  EXPECT_EQ(R.reduce(tri.basis(0, 0)).coeff(0) % 2, 1u);
  EXPECT_EQ(R.reduce(tri.basis(1, 0)).coeff(0), 0u);
  EXPECT_EQ(newton_slopes(tri.slope_b), poly({"0"}));
  EXPECT_EQ(newton_slopes(tri.higher), poly({"1"}));
  auto ss = slope_splitting(Crystal(1, mat(R, {{0, 2}, {1, 0}})), 0);
  EXPECT_EQ(ss.slope_b.rank(), 0);
  EXPECT_EQ(ss.higher.rank(), 2);
  EXPECT_EQ(kind_of([&] { slope_splitting(Crystal(1, mat(R, {{1, 0}, {0, 2}})), 1); }), ErrorKind::NoSplit);
}

TEST(Crystal, HomGroupExamples) {
  const WittRing& R = witt_ring(make_field(3, 1), 2);
  EXPECT_EQ(hom_group(slope_line_crystal(0, R, 1), 0).exponents, std::vector<int>{2});
  EXPECT_TRUE(hom_group(slope_line_crystal(1, R, 1), 0).exponents.empty());
  const WittRing& R4 = witt_ring(make_field(2, 1), 4);
  // diag(1,p), b=1: the first coordinate is forced to zero, the second is free.
  EXPECT_EQ(hom_group(Crystal(1, mat(R4, {{1, 0}, {0, 2}})), 1).exponents, std::vector<int>{4});
}

TEST(Crystal, HomGroupMatchesBruteForceOverSmallRings) {
  // Count v in W_s(F_4)^1 with a sigma(v) = p^b v by enumerating all of W_2(F_4).
  const WittRing& R = witt_ring(make_field(2, 2), 2);
  std::vector<WittElement> all;
  for (u64 a = 0; a < 4; ++a)
    for (u64 b = 0; b < 4; ++b) all.push_back(R.from_coeffs({a, b}));
  for (const auto& a : all)
    for (int b = 0; b < 2; ++b) {
      WittMatrix m(R, 1, 1);
      m(0, 0) = a;
      int count = 0;
      for (const auto& v : all)
        if (a * R.frobenius(v, 1) == R.p_power(b) * v) ++count;
      const int log = hom_group(Crystal(1, m, false), b).log_order();
      EXPECT_EQ(1 << log, count);
    }
}

TEST(Crystal, CharpolyIsExact) {
  std::mt19937_64 rng(21);
  const WittRing& R = witt_ring(make_field(3, 2), 4);
  for (int t = 0; t < 20; ++t) {
    const int r = 1 + static_cast<int>(rng() % 4);
    WittMatrix m = random_matrix(R, r, rng, 2);
    auto cp = charpoly(m);
    ASSERT_EQ(static_cast<int>(cp.size()), r + 1);
    EXPECT_TRUE(cp.back().is_one());
    // Cayley-Hamilton.
    WittMatrix acc(R, r, r), power = WittMatrix::identity(R, r);
    for (int i = 0; i <= r; ++i) {
      acc = acc + power.scaled(cp[i]);
      power = power * m;
    }
    EXPECT_TRUE(acc.is_zero());
    EXPECT_EQ(determinant(m), laplace_det(m));
  }
}

TEST(Crystal, SmithFormTransformsAreConsistent) {
  std::mt19937_64 rng(5);
  const WittRing& R = witt_ring(make_field(2, 3), 5);
  for (int t = 0; t < 20; ++t) {
    const int r = 1 + static_cast<int>(rng() % 4);
    WittMatrix m = random_matrix(R, r, rng, 3);
    SmithForm sf = smith_form(m, true);
    WittMatrix d = sf.left * m * sf.right;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (i != j) EXPECT_TRUE(d(i, j).is_zero());
        else if (sf.exponents[i].finite()) EXPECT_EQ(d(i, i), R.p_power(sf.exponents[i].value()));
        else EXPECT_TRUE(d(i, i).is_zero());
      }
    EXPECT_EQ(sf.left * sf.left_inverse, WittMatrix::identity(R, r));
  }
}

TEST(Crystal, RandomInvariants) {
  std::mt19937_64 rng(77);
  int done = 0;
  for (int t = 0; t < 120; ++t) {
    const u64 p = (t % 2) ? 3 : 2;
    const int deg = 1 + static_cast<int>(rng() % 2);
    const int n = 1 + static_cast<int>(rng() % 2);
    const int r = 1 + static_cast<int>(rng() % 3);
    const WittRing& R = witt_ring(make_field(p, deg), 4);
    Crystal c(n, random_matrix(R, r, rng, 1));
    NewtonPolygon nu;
    try {
      nu = newton_slopes(c);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::NotIsogeny);
      continue;
    }
    ++done;
    EXPECT_EQ(nu.height(), det_valuation(c));
    EXPECT_EQ(p_rank_stable(c), nu.multiplicity(0));
    const Crystal hi = c.at_precision(c.linearization_exponent() * nu.height() + 2);
    EXPECT_TRUE(lies_above(nu, hodge_polygon(hi).as_polygon()));
    for (int a = 1; a <= r; ++a) EXPECT_EQ(newton_slopes(exterior_power_crystal(c, a)), exterior_power(nu, a));
    EXPECT_EQ(newton_slopes(iterate_crystal(c, 2)), scale_iterate(nu, 2));
  }
  EXPECT_GT(done, 60);
}
