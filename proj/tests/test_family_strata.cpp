#include <gtest/gtest.h>

#include <cstdlib>

#include "cstrata/error.hpp"
#include "cstrata/family_strata.hpp"

using namespace cstrata;

namespace {

NewtonPolygon poly(const char* s) { return parse_polygon(s); }

std::vector<u64> counts(const StrataReport& r, const std::string& key) {
  const Stratum* s = r.find(key);
  return s ? s->counts : std::vector<u64>{};
}

}  // namespace

TEST(FamilyStrata, LegendreFibers) {
  const CrystalFamily f = shipped_family("legendre-2");
  const FieldPtr F2 = make_field(2, 1);
  const Crystal one = fiber(f, {F2->one()});
  EXPECT_EQ(reduce_mod_p(one.matrix())(0, 0), F2->one());
  EXPECT_EQ(newton_slopes(one), poly("0,1"));
  EXPECT_EQ(newton_slopes(fiber(f, {F2->zero()})), poly("1/2,1/2"));
  const FieldPtr K = make_field(2, 5);
  EXPECT_EQ(newton_slopes(fiber(f, {K->generator()})), poly("0,1"));
  EXPECT_THROW(fiber(f, {}), Error);
}

TEST(FamilyStrata, ConstantFamilyFibers) {
  const CrystalFamily f = shipped_family("supersingular-constant");
  const FieldPtr K = make_field(2, 3);
  for (const auto& t : enumerate(*K)) {
    const Crystal c = fiber(f, {t});
    EXPECT_EQ(c.matrix()(0, 1), c.ring().from_int(2));
    EXPECT_EQ(c.matrix()(1, 0), c.ring().one());
    EXPECT_TRUE(c.matrix()(0, 0).is_zero());
  }
}

TEST(FamilyStrata, InvalidFamilyIsRejected) {
  const WittRing& R = witt_ring(make_field(2, 1), 2);
  CrystalFamily bad("det-t", 1, R, 1, {{{FamilyMonomial{{1}, R.one()}}}});
  const FieldPtr F2 = make_field(2, 1);
  try {
    fiber(bad, {F2->one()});
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotIsogenyAtPoint);
  }
  // Declared valuation 0 holds at t = 1 but not at t = 0.
  CrystalFamily declared("det-t", 1, R, 1, {{{FamilyMonomial{{1}, R.one()}}}}, true, 0);
  EXPECT_NO_THROW(fiber(declared, {F2->one()}));
  EXPECT_THROW(fiber(declared, {F2->zero()}), Error);
  EXPECT_FALSE(semicontinuity_check(bad, 3).pass);
}

TEST(FamilyStrata, LegendreSweep) {
  const CrystalFamily f = shipped_family("legendre-2");
  SweepOptions opts;
  opts.max_m = 4;
  opts.breaks = {{1, 0}};
  const StrataReport r = sweep(f, opts);
  EXPECT_EQ(counts(r, newton_key(poly("0,1"))), (std::vector<u64>{1, 3, 7, 15}));
  EXPECT_EQ(counts(r, newton_key(poly("1/2,1/2"))), (std::vector<u64>{1, 1, 1, 1}));
  EXPECT_EQ(counts(r, prank_key(1)), (std::vector<u64>{1, 3, 7, 15}));
  EXPECT_EQ(counts(r, break_key({1, 0})), (std::vector<u64>{1, 3, 7, 15}));
  EXPECT_TRUE(partition_check(r, opts.breaks).pass);
  opts.max_m = 30;
  EXPECT_THROW(sweep(f, opts), Error);
}

TEST(FamilyStrata, SingleStratumFamilies) {
  SweepOptions opts;
  opts.max_m = 3;
  const StrataReport r = sweep(shipped_family("ordinary-constant"), opts);
  EXPECT_EQ(counts(r, newton_key(poly("0,1"))), (std::vector<u64>{2, 4, 8}));
  const WittRing& R = witt_ring(make_field(3, 1), 2);
  CrystalFamily line("p-line", 1, R, 1, {{{FamilyMonomial{{0}, R.from_int(3)}}}});
  const StrataReport r1 = sweep(line, opts);
  EXPECT_EQ(counts(r1, newton_key(poly("1"))), (std::vector<u64>{3, 9, 27}));
}

TEST(FamilyStrata, DimensionEstimates) {
  const CrystalFamily f = shipped_family("legendre-2");
  SweepOptions opts;
  opts.max_m = 8;
  const StrataReport r = sweep(f, opts);
  const auto open = estimate_dimension(r, prank_key(1));
  EXPECT_NEAR(open.value, 1.0, 0.2);
  EXPECT_TRUE(open.confident);
  EXPECT_EQ(open.m2, 8);
  EXPECT_NEAR(estimate_dimension(r, prank_key(0)).value, 0.0, 1e-12);
  EXPECT_THROW(estimate_dimension(r, prank_key(2)), Error);
  EXPECT_THROW(estimate_dimension(2, {0, 0, 5}), Error);
}

TEST(FamilyStrata, PurityReports) {
  const auto leg = purity_report(shipped_family("legendre-2"), prank_key(1), 8);
  EXPECT_TRUE(leg.pass) << leg.message;
  EXPECT_NEAR(leg.codimension, 1.0, 0.2);
  const auto leg_nu = purity_report(shipped_family("legendre-3"), newton_key(poly("0,1")), 6);
  EXPECT_TRUE(leg_nu.pass) << leg_nu.message;
  const auto two = purity_report(shipped_family("triangular-2param"), prank_key(2), 6);
  EXPECT_TRUE(two.pass) << two.message;
  ASSERT_TRUE(two.boundary_dim);
  EXPECT_NEAR(two.boundary_dim->value, 1.0, 0.2);
  const auto mid = purity_report(shipped_family("triangular-2param"), prank_key(1), 6);
  EXPECT_TRUE(mid.pass) << mid.message;
  const auto constant = purity_report(shipped_family("ordinary-constant"), prank_key(1), 3);
  EXPECT_TRUE(constant.pass);
  EXPECT_TRUE(constant.boundary_empty);
  EXPECT_THROW(purity_report(shipped_family("ordinary-constant"), prank_key(0), 3), Error);
}

TEST(FamilyStrata, Semicontinuity) {
  for (const auto& f : shipped_families()) {
    const auto rep = semicontinuity_check(f, std::min(default_max_m(f), 4));
    EXPECT_TRUE(rep.pass) << f.name() << ": " << rep.message;
  }
  EXPECT_EQ(semicontinuity_check(shipped_family("legendre-2"), 4).details.front(), "generic polygon {0,1}");
}

TEST(FamilyStrata, StrataIntersection) {
  const CrystalFamily f = shipped_family("legendre-2");
  for (const char* nu : {"0,1", "1/2,1/2", "1,1", "0,2"}) {
    const auto rep = strata_intersection_Snu(f, poly(nu), 4);
    EXPECT_TRUE(rep.pass) << nu;
  }
  EXPECT_TRUE(strata_intersection_Snu(shipped_family("triangular-2param"), poly("1/3,1/3,1/3"), 3).pass);
}

TEST(FamilyStrata, ArtinSchreierStrataMatchPRank) {
  for (const auto& f : shipped_families()) {
    const auto rep = as_prank_equivalence(f, std::min(default_max_m(f), 4));
    EXPECT_TRUE(rep.pass) << f.name() << ": " << rep.message;
  }
}

TEST(FamilyStrata, TwoParameterStrata) {
  SweepOptions opts;
  opts.max_m = 3;
  const StrataReport r = sweep(shipped_family("triangular-2param"), opts);
  // p-rank 2 off tu = 0, 1 on the axes minus the origin, 0 at the origin.
  EXPECT_EQ(counts(r, prank_key(2)), (std::vector<u64>{1, 9, 49}));
  EXPECT_EQ(counts(r, prank_key(1)), (std::vector<u64>{2, 6, 14}));
  EXPECT_EQ(counts(r, prank_key(0)), (std::vector<u64>{1, 1, 1}));
  EXPECT_EQ(counts(r, newton_key(poly("1/3,1/3,1/3"))), (std::vector<u64>{1, 1, 1}));
  EXPECT_EQ(counts(r, newton_key(poly("0,1/2,1/2"))), (std::vector<u64>{2, 6, 14}));
}

TEST(FamilyStrata, SweepIndependentOfThreadCount) {
  SweepOptions opts;
  opts.max_m = 3;
  opts.as_counts = true;
  setenv("CRYSTAL_STRATA_THREADS", "1", 1);
  const StrataReport a = sweep(shipped_family("triangular-2param"), opts);
  setenv("CRYSTAL_STRATA_THREADS", "4", 1);
  const StrataReport b = sweep(shipped_family("triangular-2param"), opts);
  unsetenv("CRYSTAL_STRATA_THREADS");
  ASSERT_EQ(a.strata.size(), b.strata.size());
  for (std::size_t i = 0; i < a.strata.size(); ++i) {
    EXPECT_EQ(a.strata[i].key, b.strata[i].key);
    EXPECT_EQ(a.strata[i].counts, b.strata[i].counts);
  }
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].coords, b.points[i].coords);
}
