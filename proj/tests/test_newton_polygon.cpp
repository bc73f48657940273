#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "cstrata/error.hpp"
#include "cstrata/newton_polygon.hpp"

using namespace cstrata;

namespace {

NewtonPolygon poly(std::initializer_list<const char*> s) {
  std::vector<Rational> q;
  for (const char* x : s) q.push_back(parse_rational(x));
  return NewtonPolygon::from_slopes(q);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;  // sentinel distinct from the kinds checked below
}

// Every nondecreasing integer slope sequence of length r with entries <= max.
void for_each_integral(int r, int max, const std::function<void(const NewtonPolygon&)>& f) {
  std::vector<std::int64_t> s(r, 0);
  std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t lo) {
    if (i == r) {
      f(NewtonPolygon::from_integers(s));
      return;
    }
    for (std::int64_t v = lo; v <= max; ++v) {
      s[i] = v;
      rec(i + 1, v);
    }
  };
  rec(0, 0);
}

}  // namespace

TEST(NewtonPolygon, ConstructionAndVertices) {
  auto a = poly({"1", "0"});
  EXPECT_EQ(a.str(), "{0,1}");
  EXPECT_EQ(break_points(a), (std::vector<BreakPoint>{{0, 0}, {1, 0}, {2, 1}}));
  auto b = poly({"1/2", "1/2"});
  EXPECT_EQ(break_points(b), (std::vector<BreakPoint>{{0, 0}, {2, 1}}));
  auto c = poly({"0", "1", "2"});
  EXPECT_EQ(break_points(c), (std::vector<BreakPoint>{{0, 0}, {1, 0}, {2, 1}, {3, 3}}));
  EXPECT_EQ(kind_of([] { poly({"1/2", "1"}); }), ErrorKind::NonIntegralBreakPoint);
  EXPECT_EQ(kind_of([] { poly({"1/3", "1/3"}); }), ErrorKind::NonIntegralBreakPoint);
  EXPECT_EQ(poly({"1/3", "1/3", "1/3"}).height(), 1);
}

TEST(NewtonPolygon, RationalParsing) {
  EXPECT_EQ(parse_rational(" 3/6 "), Rational(1, 2));
  EXPECT_EQ(to_string(Rational(4, 2)), "2");
  EXPECT_EQ(to_string(Rational(1, 3)), "1/3");
  EXPECT_EQ(kind_of([] { parse_rational("1/0"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { parse_rational("x"); }), ErrorKind::InvalidInput);
}

TEST(NewtonPolygon, BreakPointsRoundTrip) {
  for (const auto& nu : {poly({"0", "1/2", "1/2", "2"}), poly({"1/3", "1/3", "1/3", "1", "1"}), poly({"0", "0"})}) {
    std::vector<Rational> rebuilt;
    auto bps = break_points(nu);
    for (std::size_t i = 1; i < bps.size(); ++i) {
      const int dx = bps[i].a - bps[i - 1].a;
      for (int k = 0; k < dx; ++k) rebuilt.emplace_back(bps[i].b - bps[i - 1].b, dx);
    }
    EXPECT_EQ(NewtonPolygon::from_slopes(rebuilt), nu);
  }
}

TEST(NewtonPolygon, LiesAbove) {
  auto a = poly({"1", "1"});
  EXPECT_TRUE(lies_above(a, a));
  EXPECT_TRUE(lies_above(a, poly({"0", "2"})));
  EXPECT_FALSE(lies_above(poly({"0", "2"}), a));
  EXPECT_EQ(kind_of([&] { lies_above(a, poly({"1"})); }), ErrorKind::RankMismatch);
}

TEST(NewtonPolygon, LiesAboveIsPartialOrder) {
  std::vector<NewtonPolygon> all;
  for_each_integral(4, 3, [&](const NewtonPolygon& nu) { all.push_back(nu); });
  for (const auto& x : all)
    for (const auto& y : all) {
      if (lies_above(x, y) && lies_above(y, x) && x.height() == y.height()) EXPECT_EQ(x, y);
      for (const auto& z : {all[3], all[17], all[30]})
        if (lies_above(x, y) && lies_above(y, z)) EXPECT_TRUE(lies_above(x, z));
    }
}

TEST(NewtonPolygon, ExteriorPower) {
  EXPECT_EQ(exterior_power(poly({"1", "2", "3"}), 2), poly({"3", "4", "5"}));
  EXPECT_EQ(exterior_power(poly({"0", "0", "1"}), 3), poly({"1"}));
  auto nu = poly({"0", "1/2", "1/2"});
  EXPECT_EQ(exterior_power(nu, 1), nu);
  EXPECT_EQ(kind_of([&] { exterior_power(nu, 0); }), ErrorKind::BadIndex);
  EXPECT_EQ(kind_of([&] { exterior_power(nu, 4); }), ErrorKind::BadIndex);
}

TEST(NewtonPolygon, HasBreak) {
  EXPECT_TRUE(has_break(poly({"0", "1"}), {1, 0}));
  EXPECT_FALSE(has_break(poly({"1/2", "1/2"}), {1, 0}));
  EXPECT_TRUE(has_break(poly({"0", "1", "2"}), {2, 1}));
  EXPECT_TRUE(has_break(poly({"1/2", "1/2"}), {0, 0}));
  EXPECT_TRUE(has_break(poly({"1/2", "1/2"}), {2, 1}));
}

TEST(NewtonPolygon, ScaleIterate) {
  auto nu = poly({"0", "1/2", "1/2"});
  EXPECT_EQ(scale_iterate(nu, 1), nu);
  EXPECT_EQ(scale_iterate(nu, 2), poly({"0", "1", "1"}));
  auto third = poly({"1/3", "1/3", "1/3"});
  auto six = scale_iterate(third, 6);
  EXPECT_EQ(six, poly({"2", "2", "2"}));
  EXPECT_TRUE(six.integral());
  // Commutes with exterior powers.
  for (int a = 1; a <= 3; ++a) EXPECT_EQ(exterior_power(scale_iterate(nu, 4), a), scale_iterate(exterior_power(nu, a), 4));
}

TEST(NewtonPolygon, Nu1AndNu2Recipes) {
  EXPECT_EQ(nu1(3, 0, 3), poly({"0", "1", "2"}));
  EXPECT_EQ(nu1(2, 0, 1), poly({"0", "1"}));
  EXPECT_EQ(nu1(3, 1, 6), poly({"1", "2", "3"}));
  EXPECT_EQ(nu2(3, 0, 3), poly({"1", "1", "1"}));
  EXPECT_EQ(nu2(2, 0, 2), poly({"1", "1"}));
  EXPECT_EQ(kind_of([] { nu2(3, 0, 2); }), ErrorKind::Infeasible);
  EXPECT_EQ(kind_of([] { nu1(3, 0, 1); }), ErrorKind::Infeasible);
}

TEST(NewtonPolygon, TMembershipExamples) {
  EXPECT_TRUE(t_membership_via_nu(poly({"0", "1", "2"}), 0));
  EXPECT_FALSE(t_membership_via_nu(poly({"1", "1", "1"}), 0));
  EXPECT_EQ(kind_of([] { t_membership_via_nu(poly({"1/2", "1/2"}), 0); }), ErrorKind::PreconditionViolated);
  EXPECT_EQ(kind_of([] { t_membership_via_nu(poly({"0", "0", "3"}), 0); }), ErrorKind::PreconditionViolated);
}

TEST(NewtonPolygon, TMembershipMatchesBreakPointExhaustively) {
  int checked = 0;
  for (int r = 2; r <= 5; ++r)
    for (std::int64_t b = 0; b <= 2; ++b)
      for_each_integral(r, 8, [&](const NewtonPolygon& nu) {
        const std::int64_t d = nu.height();
        if (d > 8) return;
        NewtonPolygon lower;
        try {
          lower = nu1(r, b, d);
        } catch (const Error&) {
          return;
        }
        if (!lies_above(nu, lower)) return;
        EXPECT_EQ(t_membership_via_nu(nu, b), has_break(nu, {1, b})) << nu.str() << " b=" << b;
        ++checked;
      });
  EXPECT_GT(checked, 100);
}
