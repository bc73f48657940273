#include <gtest/gtest.h>

#include <random>

#include "cstrata/error.hpp"
#include "cstrata/witt_ring.hpp"

using namespace cstrata;

namespace {

WittElement random_elem(const WittRing& R, std::mt19937_64& rng) {
  std::vector<u64> c(R.deg());
  for (auto& x : c) x = rng() % R.modulus();
  return R.from_coeffs(c);
}

u64 ipow(u64 b, int e) {
  u64 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST(WittRing, PrimeFieldGivesIntegersModPs) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  EXPECT_EQ(R.modulus(), 8u);
  EXPECT_EQ((R.from_int(5) * R.from_int(7)).coeff(0), 35u % 8);
  EXPECT_EQ((R.from_int(-1)).coeff(0), 7u);
  const WittRing& R3 = witt_ring(make_field(3, 1), 1);
  EXPECT_EQ(R3.modulus(), 3u);
}

TEST(WittRing, FrobeniusLiftOnW2F4) {
  const WittRing& R = witt_ring(make_field(2, 2), 2);
  const WittElement X = R.generator();
  const WittElement fx = R.frobenius(X, 1);
  // Root of the lifted polynomial X^2 + X + 1 over Z/4.
  EXPECT_TRUE((fx * fx + fx + R.one()).is_zero());
  // Congruent to X^2 mod 2.
  EXPECT_EQ(R.reduce(fx), R.reduce(X * X));
  EXPECT_EQ(R.frobenius(fx, 1), X);
  EXPECT_EQ(R.frobenius(X, 2), X);
}

TEST(WittRing, FrobeniusIsAutomorphismReducingToPthPower) {
  std::mt19937_64 rng(5);
  for (auto [p, d, s] : {std::tuple<u64, int, int>{2, 3, 5}, {3, 2, 4}, {5, 2, 3}, {2, 4, 8}}) {
    const WittRing& R = witt_ring(make_field(p, d), s);
    for (int t = 0; t < 30; ++t) {
      WittElement x = random_elem(R, rng), y = random_elem(R, rng);
      EXPECT_EQ(R.frobenius(x + y, 1), R.frobenius(x, 1) + R.frobenius(y, 1));
      EXPECT_EQ(R.frobenius(x * y, 1), R.frobenius(x, 1) * R.frobenius(y, 1));
      EXPECT_EQ(R.frobenius(x, static_cast<u64>(d)), x);
      EXPECT_EQ(R.frobenius(R.frobenius(x, 1), 1), R.frobenius(x, 2));
      EXPECT_EQ(R.reduce(R.frobenius(x, 1)), R.reduce(x).pow(p));
    }
    EXPECT_EQ(R.frobenius(R.from_int(static_cast<std::int64_t>(p)), 1), R.from_int(static_cast<std::int64_t>(p)));
  }
}

TEST(WittRing, RingAxiomsSampled) {
  std::mt19937_64 rng(9);
  const WittRing& R = witt_ring(make_field(3, 3), 4);
  for (int t = 0; t < 100; ++t) {
    WittElement a = random_elem(R, rng), b = random_elem(R, rng), c = random_elem(R, rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
  }
}

TEST(WittRing, TeichmullerExamples) {
  const WittRing& R = witt_ring(make_field(3, 1), 2);
  const FiniteField& F = *R.field();
  EXPECT_EQ(R.teichmuller(F.from_int(2)).coeff(0), 8u);
  EXPECT_TRUE(R.teichmuller(F.zero()).is_zero());
  EXPECT_TRUE(R.teichmuller(F.one()).is_one());
}

TEST(WittRing, TeichmullerIsMultiplicativeSection) {
  for (auto [p, d, s] : {std::tuple<u64, int, int>{3, 4, 3}, {2, 4, 4}, {3, 2, 5}, {5, 2, 3}}) {
    const WittRing& R = witt_ring(make_field(p, d), s);
    const auto elems = enumerate(*R.field());
    std::vector<WittElement> lifts;
    for (const auto& c : elems) lifts.push_back(R.teichmuller(c));
    const u64 q = R.field()->cardinality();
    for (std::size_t i = 0; i < elems.size(); ++i) {
      EXPECT_EQ(R.reduce(lifts[i]), elems[i]);
      EXPECT_EQ(lifts[i].pow(q), lifts[i]);
    }
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
      std::size_t i = rng() % elems.size(), j = rng() % elems.size();
      EXPECT_EQ(lifts[i] * lifts[j], R.teichmuller(elems[i] * elems[j]));
    }
  }
}

TEST(WittRing, ValuationExamplesAndMultiplicativity) {
  const WittRing& R = witt_ring(make_field(2, 1), 3);
  EXPECT_TRUE(R.zero().valuation().is_infinite());
  EXPECT_EQ(R.one().valuation(), Valuation(0));
  EXPECT_EQ(R.from_int(4).valuation(), Valuation(2));
  EXPECT_EQ(R.from_int(4).divide_p_power(2), R.one());

  std::mt19937_64 rng(4);
  const WittRing& S = witt_ring(make_field(3, 2), 6);
  for (int t = 0; t < 300; ++t) {
    WittElement x = random_elem(S, rng).times_p_power(static_cast<int>(rng() % 3));
    WittElement y = random_elem(S, rng).times_p_power(static_cast<int>(rng() % 3));
    const Valuation vx = x.valuation(), vy = y.valuation();
    if (vx.finite() && vy.finite() && vx.value() + vy.value() < S.s())
      EXPECT_EQ((x * y).valuation(), vx + vy);
    if (vx.finite()) EXPECT_EQ(x.divide_p_power(vx.value()).times_p_power(vx.value()), x);
  }
}

TEST(WittRing, UnitInverse) {
  std::mt19937_64 rng(8);
  const WittRing& R = witt_ring(make_field(2, 5), 7);
  for (int t = 0; t < 100; ++t) {
    WittElement x = random_elem(R, rng);
    if (!x.is_unit()) continue;
    EXPECT_TRUE((x * x.inverse()).is_one());
  }
  try {
    R.from_int(2).inverse();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolated);
  }
}

TEST(WittRing, PrecisionGuards) {
  try {
    witt_ring(make_field(2, 1), 62);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PrecisionTooLarge);
  }
  EXPECT_EQ(witt_ring(make_field(2, 1), 61).modulus(), u64{1} << 61);
}

TEST(WittRing, EmbeddingIsFrobeniusEquivariantHomomorphism) {
  std::mt19937_64 rng(12);
  for (auto [p, a, b, s] : {std::tuple<u64, int, int, int>{2, 2, 4, 5}, {3, 1, 3, 3}, {3, 2, 4, 3}}) {
    const WittRing& S = witt_ring(make_field(p, a), s);
    const WittRing& T = witt_ring(make_field(p, b), s);
    WittEmbedding e = make_witt_embedding(S, T);
    for (int t = 0; t < 30; ++t) {
      WittElement x = random_elem(S, rng), y = random_elem(S, rng);
      EXPECT_EQ(embed(e, x * y), embed(e, x) * embed(e, y));
      EXPECT_EQ(embed(e, x + y), embed(e, x) + embed(e, y));
      EXPECT_EQ(embed(e, S.frobenius(x, 1)), T.frobenius(embed(e, x), 1));
    }
    // Teichmueller lifts are carried to Teichmueller lifts.
    const Embedding fe = make_embedding(S.field(), T.field());
    for (const auto& c : enumerate(*S.field()))
      EXPECT_EQ(embed(e, S.teichmuller(c)), T.teichmuller(cstrata::embed(fe, c)));
  }
}

TEST(GenericWitt, LowOrderStructurePolynomials) {
  const WittTables& t = generic_witt_ops(2, 2);
  // S_0 = x_0 + y_0, P_0 = x_0 y_0 (variables x_0, x_1, y_0, y_1).
  ASSERT_EQ(t.sum[0].terms.size(), 2u);
  ASSERT_EQ(t.product[0].terms.size(), 1u);
  EXPECT_EQ(t.product[0].terms[0].exponents, (std::vector<std::uint16_t>{1, 0, 1, 0}));
  // S_1 = x_1 + y_1 + x_0 y_0 mod 2.
  std::vector<std::vector<std::uint16_t>> s1;
  for (const auto& term : t.sum[1].terms) {
    EXPECT_EQ(term.coeff, 1u);
    s1.push_back(term.exponents);
  }
  std::sort(s1.begin(), s1.end());
  std::vector<std::vector<std::uint16_t>> expect{{0, 0, 0, 1}, {0, 1, 0, 0}, {1, 0, 1, 0}};
  EXPECT_EQ(s1, expect);
}

TEST(GenericWitt, GuardAboveMaximalPrecision) {
  try {
    generic_witt_ops(2, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PrecisionTooLarge);
  }
}

TEST(GenericWitt, IntegerBijectionRoundTrips) {
  for (u64 p : {2u, 3u})
    for (int s = 1; s <= 5; ++s)
      for (u64 n = 0; n < ipow(p, s); ++n) EXPECT_EQ(GenericWittVector::from_integer(p, s, n).to_integer(), n);
}

TEST(GenericWitt, FullTablesAgreeWithPrimeFieldForms) {
  // Evaluate the genuine polynomials directly and compare with the fast path.
  for (auto [p, s] : {std::pair<u64, int>{2, 3}, {3, 3}, {2, 4}}) {
    const WittTables& full = generic_witt_ops(p, s);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
      std::vector<u64> x(s), y(s);
      for (auto& v : x) v = rng() % p;
      for (auto& v : y) v = rng() % p;
      auto eval = [&](const WittPolynomial& poly) {
        u64 acc = 0;
        for (const auto& term : poly.terms) {
          u64 v = term.coeff;
          for (int i = 0; i < 2 * s; ++i)
            for (int e = 0; e < term.exponents[i]; ++e) v = v * (i < s ? x[i] : y[i - s]) % p;
          acc = (acc + v) % p;
        }
        return acc;
      };
      GenericWittVector a(p, x), b(p, y);
      auto sum = (a + b).components();
      auto prod = (a * b).components();
      for (int k = 0; k < s; ++k) {
        EXPECT_EQ(eval(full.sum[k]), sum[k]);
        EXPECT_EQ(eval(full.product[k]), prod[k]);
      }
    }
  }
}

TEST(GenericWitt, BackendsAgree) {
  EXPECT_TRUE(crosscheck_backends(2, 1, 200, 0).mismatches.empty());
  EXPECT_TRUE(crosscheck_backends(2, 3, 1000, 1).mismatches.empty());
  EXPECT_TRUE(crosscheck_backends(3, 2, 1000, 2).mismatches.empty());
  EXPECT_TRUE(crosscheck_backends(3, 5, 300, 3).mismatches.empty());
}
