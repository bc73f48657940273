#include <gtest/gtest.h>

#include "cstrata/error.hpp"
#include "cstrata/oracles.hpp"

using namespace cstrata;

namespace {

void expect_pass(const OracleReport& r, u64 min_cases) {
  EXPECT_TRUE(r.pass()) << r.name << ": " << (r.failures.empty() ? "" : r.failures.front());
  EXPECT_GE(r.cases, min_cases) << r.name;
}

}  // namespace

TEST(Oracles, SmallPolygonSuites) {
  expect_pass(lemma1_oracle(4, 2), 100);
  expect_pass(t_identity_oracle(4, 6, 1), 10);
}

TEST(Oracles, SmallAlgebraSuites) {
  expect_pass(fact1_oracle(2, 3, 2, 20, 1), 100);
  expect_pass(fact1_oracle(3, 2, 2, 20, 1), 100);
  expect_pass(prop2_oracle(2, 2, 40, 1), 40);
  expect_pass(prop2_oracle(3, 1, 20, 1), 20);
  expect_pass(witt_crosscheck_oracle(50, 1), 500);
}

TEST(Oracles, SmallCrystalSuites) {
  expect_pass(prank_crosscheck(2, 20, 1), 100);
  expect_pass(functor_oracle(30, 1), 30);
  expect_pass(mazur_oracle(50, 1), 50);
  expect_pass(splitting_oracle(20, 1), 20);
}

TEST(Oracles, SuiteNames) {
  EXPECT_EQ(suite_names().size(), 12u);
  EXPECT_THROW(run_suite("nope", 0), Error);
}
