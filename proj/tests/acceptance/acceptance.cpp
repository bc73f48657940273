// One line per acceptance criterion: PASS/FAIL, case count, elapsed time
// against the pinned limit. Exit status 0 only when every line passes.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "cstrata/oracles.hpp"

namespace {

struct Criterion {
  int id;
  const char* suite;
  const char* title;
  double limit_seconds;
  cstrata::u64 min_cases;
};

const std::vector<Criterion> kCriteria = {
    {1, "lemma1", "vertex biconditional under exterior powers, r <= 6, slopes <= 3", 10, 1},
    {2, "fact1", "primitive vectors keep valuation <= t, p in {2,3}, s <= 4, r <= 3", 20, 1},
    {3, "prop2", "Artin-Schreier counts against tuple enumeration, 1000 systems", 60, 1000},
    {4, "prank", "slope-0 multiplicity = stable rank = E1 count", 60, 200},
    {5, "functor", "Newton polygons commute with exterior powers and iterates", 30, 200},
    {6, "t-identity", "T_(1,b) = S_{>=nu1} - S_{>=nu2}, r <= 5, d <= 8, b <= 2", 5, 1},
    {7, "mazur", "Newton above Hodge, 500 crystals", 30, 500},
    {8, "gk", "semicontinuity and constant v(det) on shipped families", 30, 1},
    {9, "purity", "boundary codimension 1 on the Legendre and two-parameter families", 120, 2},
    {10, "def1b", "E1 fiber-count strata = p-rank strata", 60, 1},
    {11, "witt", "Witt polynomials against Z/p^s arithmetic, p in {2,3}, s <= 5", 10, 1000},
    {12, "splitting", "slope-b splitting round trip, 100 crystals", 30, 100},
};

}  // namespace

int main(int argc, char** argv) {
  const cstrata::u64 seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
  int failed = 0;
  for (const auto& c : kCriteria) {
    const cstrata::OracleReport r = cstrata::run_suite(c.suite, seed);
    const bool ok = r.pass() && r.seconds < c.limit_seconds && r.cases >= c.min_cases;
    failed += ok ? 0 : 1;
    std::printf("%s [%2d] %-10s %s: %llu cases, %llu failures, %.2f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.suite, c.title,
                static_cast<unsigned long long>(r.cases), static_cast<unsigned long long>(r.failure_count), r.seconds,
                c.limit_seconds);
    for (const auto& f : r.failures) std::printf("       witness: %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(kCriteria.size()) - failed, kCriteria.size());
  return failed == 0 ? 0 : 1;
}
