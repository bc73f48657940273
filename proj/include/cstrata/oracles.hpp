#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cstrata/field_tower.hpp"

namespace cstrata {

struct OracleReport {
  std::string name;
  u64 cases = 0;
  std::vector<std::string> failures;  // at most kMaxWitnesses, smallest first
  std::vector<std::string> notes;
  double seconds = 0;

  bool pass() const { return failures.empty() && failure_count == 0; }
  u64 failure_count = 0;
};

inline constexpr std::size_t kMaxWitnesses = 10;

/// (a, nu(a)) is a vertex of nu iff (1, nu(a)) is a vertex of the a-th
/// exterior power, for every valid polygon with rank <= max_r and slopes <=
/// max_slope; also beta_2 - beta_1 = alpha_{a+1} - alpha_a.
OracleReport lemma1_oracle(int max_r = 6, int max_slope = 3);

/// Matrices over Z/p^s whose cokernel is killed by p^t send primitive vectors
/// to vectors of valuation <= t; for every s <= max_s and r <= max_r.
OracleReport fact1_oracle(u64 p, int max_s = 4, int max_r = 3, int per_config = 500, u64 seed = 0);

/// Random generalized Artin-Schreier systems of degree <= 2: Jacobian, p-power
/// geometric counts, and linear-algebra counts against tuple enumeration.
OracleReport prop2_oracle(u64 p, int max_r = 2, int trials = 500, u64 seed = 0);

/// Slope-0 multiplicity, stable rank of iterates and E1 solution count agree:
/// every 2x2 matrix mod p (n, deg in {1, 2}, s = 4) plus random samples.
OracleReport prank_crosscheck(u64 p, int random_samples = 100, u64 seed = 0);

/// Semicontinuity and det-valuation constancy on every shipped family, at
/// max_m = 8 over F_2.
OracleReport gk_semicontinuity_oracle();

/// Newton polygons commute with exterior powers and iterates.
OracleReport functor_oracle(int trials = 200, u64 seed = 0);

/// Newton polygon above Hodge polygon.
OracleReport mazur_oracle(int trials = 500, u64 seed = 0);

/// t_membership_via_nu against the direct break-point test, exhaustively.
OracleReport t_identity_oracle(int max_r = 5, int max_d = 8, int max_b = 2);

/// Boundary codimension estimates on the shipped families.
OracleReport purity_oracle(int max_m = 8);

/// Artin-Schreier fiber-count strata against p-rank strata on the families.
OracleReport def1b_oracle();

/// Generic Witt polynomials against Z/p^s arithmetic.
OracleReport witt_crosscheck_oracle(int trials = 1000, u64 seed = 0);

/// Slope splitting of crystals with a slope-b bottom part.
OracleReport splitting_oracle(int trials = 100, u64 seed = 0);

/// Suite names accepted by run_suite, in run order.
const std::vector<std::string>& suite_names();

/// Runs one named suite with default sizes; "prop2", "fact1" and "prank" cover
/// p = 2 and 3. InvalidInput for unknown names.
OracleReport run_suite(const std::string& name, u64 seed);

}  // namespace cstrata
