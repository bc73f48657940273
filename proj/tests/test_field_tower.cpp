#include <gtest/gtest.h>

#include <random>

#include "cstrata/error.hpp"
#include "cstrata/field_tower.hpp"

using namespace cstrata;

namespace {

FFElem random_elem(const FiniteField& F, std::mt19937_64& rng) {
  std::vector<u64> c(F.deg());
  for (auto& x : c) x = rng() % F.p();
  return F.from_coeffs(c);
}

}  // namespace

TEST(FieldTower, PrimeFieldUsesPolynomialX) {
  auto F = make_field(2, 1, 0);
  EXPECT_EQ(F->defining_poly(), (std::vector<u64>{0, 1}));
  EXPECT_EQ(F->cardinality(), 2u);
  auto F3 = make_field(3, 1, 0);
  EXPECT_EQ(F3->cardinality(), 3u);
}

TEST(FieldTower, QuadraticOverF2IsUnique) {
  auto F = make_field(2, 2, 0);
  EXPECT_EQ(F->defining_poly(), (std::vector<u64>{1, 1, 1}));
}

TEST(FieldTower, SeededSearchIsDeterministic) {
  for (u64 seed : {0u, 1u, 7u, 12345u}) {
    auto a = make_field(3, 5, seed);
    auto b = make_field(3, 5, seed);
    EXPECT_EQ(a->defining_poly(), b->defining_poly());
    EXPECT_TRUE(is_irreducible(3, a->defining_poly()));
  }
}

TEST(FieldTower, RejectsCompositeCharacteristic) {
  try {
    make_field(4, 2, 0);
    FAIL() << "expected NotPrime";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPrime);
  }
}

TEST(FieldTower, IrreducibilityAgreesWithRootCountForCubics) {
  // A cubic over F_p is irreducible iff it has no root in F_p.
  for (u64 p : {2u, 3u, 5u}) {
    for (u64 a = 0; a < p; ++a)
      for (u64 b = 0; b < p; ++b)
        for (u64 c = 0; c < p; ++c) {
          bool has_root = false;
          for (u64 x = 0; x < p; ++x)
            if ((x * x * x + a * x * x + b * x + c) % p == 0) has_root = true;
          EXPECT_EQ(is_irreducible(p, {c, b, a, 1}), !has_root) << p << " " << a << b << c;
        }
  }
}

TEST(FieldTower, FrobeniusOnF4) {
  auto F = make_field(2, 2, 0);
  const FFElem g = F->generator();
  EXPECT_EQ(frobenius(g, 1), g + F->one());
  EXPECT_EQ(frobenius(g, 0), g);
  auto F2 = make_field(2, 1, 0);
  EXPECT_EQ(frobenius(F2->one(), 1), F2->one());
}

TEST(FieldTower, FrobeniusIsRingMapOfOrderDeg) {
  std::mt19937_64 rng(3);
  for (auto [p, d] : {std::pair<u64, int>{2, 5}, {3, 4}, {5, 3}, {7, 2}}) {
    auto F = make_field(p, d, 0);
    for (int t = 0; t < 50; ++t) {
      FFElem x = random_elem(*F, rng), y = random_elem(*F, rng);
      EXPECT_EQ(frobenius(x + y, 1), frobenius(x, 1) + frobenius(y, 1));
      EXPECT_EQ(frobenius(x * y, 2), frobenius(x, 2) * frobenius(y, 2));
      EXPECT_EQ(frobenius(x, static_cast<u64>(d)), x);
      EXPECT_EQ(frobenius(x, 1), x.pow(p));
    }
  }
}

TEST(FieldTower, EveryElementSatisfiesFieldEquation) {
  for (auto [p, d] : {std::pair<u64, int>{2, 4}, {3, 2}, {3, 3}, {5, 2}}) {
    auto F = make_field(p, d, 0);
    for (const auto& x : enumerate(*F)) {
      EXPECT_EQ(x.pow(F->cardinality()), x);
      if (!x.is_zero()) EXPECT_TRUE((x * x.inverse()).is_one());
    }
  }
}

TEST(FieldTower, EnumerateSizesAndCap) {
  EXPECT_EQ(enumerate(*make_field(2, 1)).size(), 2u);
  EXPECT_EQ(enumerate(*make_field(2, 2)).size(), 4u);
  EXPECT_EQ(enumerate(*make_field(3, 2)).size(), 9u);
  auto F2 = make_field(2, 1);
  auto e = enumerate(*F2);
  EXPECT_TRUE(e[0].is_zero());
  EXPECT_TRUE(e[1].is_one());
  try {
    enumerate(*make_field(2, 21));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::TooLarge);
  }
}

TEST(FieldTower, EmbeddingF4IntoF16) {
  auto F4 = make_field(2, 2), F16 = make_field(2, 4);
  Embedding e = make_embedding(F4, F16);
  const FFElem r = e.image_of_generator;
  EXPECT_TRUE((r * r + r + F16->one()).is_zero());
  // Least root by scanning in index order.
  for (const auto& y : enumerate(*F16)) {
    if ((y * y + y + F16->one()).is_zero()) {
      EXPECT_EQ(y, r);
      break;
    }
  }
  EXPECT_TRUE(embed(e, F4->zero()).is_zero());
  EXPECT_TRUE(embed(e, F4->one()).is_one());
  auto F2 = make_field(2, 1);
  EXPECT_TRUE(embed(make_embedding(F2, F4), F2->one()).is_one());
}

TEST(FieldTower, EmbeddingIsInjectiveHomomorphismCommutingWithFrobenius) {
  std::mt19937_64 rng(11);
  for (auto [p, a, b] : {std::tuple<u64, int, int>{2, 2, 6}, {3, 2, 4}, {2, 3, 6}, {5, 1, 3}}) {
    auto S = make_field(p, a), T = make_field(p, b);
    Embedding e = make_embedding(S, T);
    for (int t = 0; t < 40; ++t) {
      FFElem x = random_elem(*S, rng), y = random_elem(*S, rng);
      EXPECT_EQ(embed(e, x + y), embed(e, x) + embed(e, y));
      EXPECT_EQ(embed(e, x * y), embed(e, x) * embed(e, y));
      EXPECT_EQ(embed(e, frobenius(x, 1)), frobenius(embed(e, x), 1));
      if (x != y) EXPECT_NE(embed(e, x), embed(e, y));
    }
  }
}

TEST(FieldTower, RootFindingMatchesScanForLargeTargets) {
  for (auto [p, a, b] : {std::tuple<u64, int, int>{2, 2, 8}, {3, 2, 6}, {2, 4, 12}, {3, 3, 6}}) {
    auto S = make_field(p, a), T = make_field(p, b);
    Embedding scanned = make_embedding(S, T);
    Embedding split = make_embedding(field_from_poly(p, S->defining_poly()), T, 1);
    EXPECT_EQ(scanned.image_of_generator, split.image_of_generator);
  }
}

TEST(FieldTower, EmbeddingDegreeMismatch) {
  try {
    make_embedding(make_field(2, 2), make_field(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegreeMismatch);
  }
}
