#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "cstrata/artin_schreier.hpp"
#include "cstrata/error.hpp"

using namespace cstrata;

namespace {

BasePoly cst(const FieldPtr& F, u64 index) { return BasePoly::constant(0, F->from_index(index)); }

ASSystem system_of(const FieldPtr& F, std::vector<ASEquation> eqs) {
  ASSystem s;
  s.base = F;
  s.equations = std::move(eqs);
  return s;
}

// Counts tuples in F_{q^m}^r satisfying every equation directly.
u64 brute_force(const ASSystem& sys, int field_exp) {
  const FieldPtr L = make_field(sys.p(), sys.base->deg() * field_exp);
  const Embedding e = make_embedding(sys.base, L);
  const auto elems = enumerate(*L);
  const int r = sys.vars();
  std::vector<std::size_t> idx(r, 0);
  u64 count = 0;
  while (true) {
    bool ok = true;
    for (int i = 0; i < r && ok; ++i) {
      FFElem rhs = e.target->zero();
      for (const auto& t : sys.equations[i].terms) {
        u64 q = 1;
        for (int k = 0; k < t.exp; ++k) q *= sys.p();
        rhs += t.coeff.eval({}, e) * elems[idx[t.var]].pow(q);
      }
      rhs += sys.equations[i].constant.eval({}, e);
      ok = rhs == elems[idx[i]];
    }
    if (ok) ++count;
    int k = 0;
    while (k < r && ++idx[k] == elems.size()) idx[k++] = 0;
    if (k == r) break;
  }
  return count;
}

WittMatrix mat(const WittRing& R, const std::vector<std::vector<std::int64_t>>& rows) {
  WittMatrix m(R, static_cast<int>(rows.size()), static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = R.from_int(rows[i][j]);
  return m;
}

}  // namespace

TEST(ArtinSchreier, DegreeExamples) {
  auto F = make_field(2, 1);
  EXPECT_EQ(degree(system_of(F, {ASEquation{{}, cst(F, 1)}})), 0);
  EXPECT_EQ(degree(system_of(F, {ASEquation{{{0, 1, cst(F, 1)}}, {}}})), 1);
  EXPECT_EQ(degree(system_of(F, {ASEquation{{{0, 2, cst(F, 1)}}, {}}})), 2);
  EXPECT_EQ(degree(system_of(F, {ASEquation{{{0, 3, cst(F, 0)}}, {}}})), 0);
  EXPECT_THROW(degree(system_of(F, {ASEquation{{{0, 0, cst(F, 1)}}, {}}})), Error);
  EXPECT_THROW(degree(system_of(F, {ASEquation{{{1, 1, cst(F, 1)}}, {}}})), Error);
}

TEST(ArtinSchreier, ReduceDegreeExamples) {
  auto F = make_field(3, 1);
  auto lin = system_of(F, {ASEquation{{{0, 1, cst(F, 1)}}, {}}});
  EXPECT_EQ(reduce_degree(lin).vars(), 1);
  auto sq = reduce_degree(system_of(F, {ASEquation{{{0, 2, cst(F, 1)}}, {}}}));
  ASSERT_EQ(sq.vars(), 2);
  EXPECT_EQ(sq.equations[0].terms[0].var, 1);
  EXPECT_EQ(sq.equations[0].terms[0].exp, 1);
  EXPECT_EQ(sq.equations[1].terms[0].var, 0);
  EXPECT_EQ(degree(sq), 1);
  auto cube = reduce_degree(system_of(F, {ASEquation{{{0, 3, cst(F, 1)}}, {}}}));
  EXPECT_EQ(cube.vars(), 3);
  EXPECT_EQ(degree(cube), 1);
  EXPECT_TRUE(jacobian_is_identity(cube));
}

TEST(ArtinSchreier, CountExamples) {
  for (u64 p : {2, 3, 5}) {
    auto F = make_field(p, 1);
    auto fixed = system_of(F, {ASEquation{{{0, 1, cst(F, 1)}}, {}}});
    EXPECT_EQ(count_solutions(fixed, {}, 1).count(p), p);
    EXPECT_EQ(geometric_count(fixed, {}).count(p), p);
    auto zero = system_of(F, {ASEquation{{}, {}}});
    EXPECT_EQ(count_solutions(zero, {}, 1).count(p), 1u);
    auto forced = system_of(F, {ASEquation{{}, {}}, ASEquation{{{0, 1, cst(F, 1)}}, {}}});
    for (int m = 1; m <= 3; ++m) EXPECT_EQ(count_solutions(forced, {}, m).count(p), 1u);
  }
}

TEST(ArtinSchreier, ArtinSchreierNeedsExtension) {
  // x = x^2 + 1 has no root in F_2 but two in F_4.
  auto F = make_field(2, 1);
  auto sys = system_of(F, {ASEquation{{{0, 1, cst(F, 1)}}, cst(F, 1)}});
  EXPECT_FALSE(count_solutions(sys, {}, 1).solvable);
  EXPECT_EQ(count_solutions(sys, {}, 2).count(2), 2u);
  auto g = geometric_count(sys, {}, {.confirm = true});
  EXPECT_EQ(g.log_p, 1);
  EXPECT_EQ(g.confirmed_degree, 2);
}

TEST(ArtinSchreier, FromCrystalE1) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  auto unit = from_crystal_E1(Crystal(1, mat(R, {{1}})));
  ASSERT_EQ(unit.vars(), 1);
  EXPECT_EQ(unit.equations[0].terms.size(), 1u);
  EXPECT_TRUE(from_crystal_E1(Crystal(1, mat(R, {{2}}))).equations[0].terms.empty());
  auto ss = from_crystal_E1(Crystal(1, mat(R, {{0, 2}, {1, 0}})));
  EXPECT_TRUE(ss.equations[0].terms.empty());
  ASSERT_EQ(ss.equations[1].terms.size(), 1u);
  EXPECT_EQ(ss.equations[1].terms[0].var, 0);
  EXPECT_TRUE(jacobian_is_identity(ss));
}

TEST(ArtinSchreier, PRankViaE1Examples) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  Crystal ord(1, mat(R, {{1, 0}, {0, 2}}));
  Crystal ss(1, mat(R, {{0, 2}, {1, 0}}));
  EXPECT_EQ(p_rank_via_E1(ord), 1);
  EXPECT_EQ(p_rank_via_E1(ss), 0);
  const Crystal e0 = slope_line_crystal(0, R, 1);
  EXPECT_EQ(p_rank_via_E1(direct_sum(ss, e0)), 1);
  EXPECT_EQ(p_rank_via_E1(direct_sum(ord, e0)), 2);
  const WittRing& R4 = witt_ring(make_field(2, 2), 3);
  Crystal twisted(2, mat(R4, {{1, 1}, {0, 2}}));
  EXPECT_EQ(p_rank_via_E1(twisted, {.confirm = true}), 1);
}

TEST(ArtinSchreier, CountsMatchBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const u64 p = trial % 2 ? 3 : 2;
    auto F = make_field(p, 1 + static_cast<int>(rng() % 2));
    const int r = 1 + static_cast<int>(rng() % 2);
    std::vector<ASEquation> eqs(r);
    for (auto& eq : eqs) {
      const int nterms = static_cast<int>(rng() % 3);
      for (int k = 0; k < nterms; ++k)
        eq.terms.push_back({static_cast<int>(rng() % r), 1 + static_cast<int>(rng() % 2),
                            cst(F, rng() % F->cardinality())});
      eq.constant = cst(F, rng() % F->cardinality());
    }
    auto sys = system_of(F, eqs);
    auto red = reduce_degree(sys);
    EXPECT_TRUE(jacobian_is_identity(sys));
    const int geo = geometric_count(sys, {}).log_p;
    for (int m = 1; m <= 4; ++m) {
      u64 size = 1;
      for (int k = 0; k < F->deg() * m * r; ++k) size *= p;
      if (size > (1u << 12)) break;
      const FiberCount c = count_solutions(sys, {}, m);
      EXPECT_EQ(c.count(p), brute_force(sys, m)) << sys.describe() << " m=" << m;
      EXPECT_EQ(count_solutions(red, {}, m).count(p), c.count(p));
      if (c.solvable) EXPECT_LE(c.log_p, geo);
    }
  }
}

TEST(ArtinSchreier, ParametrizedCoefficients) {
  // x = t x^2 over F_2[t]: at t = 0 only x = 0, elsewhere two geometric points.
  auto F = make_field(2, 1);
  ASSystem sys;
  sys.base = F;
  sys.params = 1;
  ASEquation eq;
  eq.terms.push_back({0, 1, BasePoly(1, {BasePoly::Term{{1}, F->one()}})});
  sys.equations.push_back(eq);
  auto K = make_field(2, 3);
  for (const auto& t : enumerate(*K)) {
    const int expected = t.is_zero() ? 0 : 1;
    EXPECT_EQ(geometric_count(sys, {t}, {.confirm = true}).log_p, expected);
  }
  EXPECT_THROW(count_solutions(sys, {K->one()}, 2), Error);
}
