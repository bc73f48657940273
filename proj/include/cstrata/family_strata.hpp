#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cstrata/artin_schreier.hpp"
#include "cstrata/crystal.hpp"
#include "cstrata/newton_polygon.hpp"

namespace cstrata {

/// coeff * t_1^{e_1} ... t_k^{e_k}.
struct FamilyMonomial {
  std::vector<int> exponents;
  WittElement coeff;
};
using FamilyEntry = std::vector<FamilyMonomial>;

/// r x r matrix of polynomials in t_1..t_k with coefficients in W_s(F_q); the
/// fiber at c is obtained by substituting Teichmueller lifts [c_i].
class CrystalFamily {
 public:
  CrystalFamily(std::string name, int n, const WittRing& ring, int params,
                std::vector<std::vector<FamilyEntry>> entries, bool exact_lift = true,
                std::optional<int> det_valuation = std::nullopt);

  const std::string& name() const { return name_; }
  u64 p() const { return ring_->p(); }
  int n() const { return n_; }
  const WittRing& ring() const { return *ring_; }
  const FieldPtr& base() const { return ring_->field(); }
  int s() const { return ring_->s(); }
  int params() const { return params_; }
  int rank() const { return static_cast<int>(entries_.size()); }
  const std::vector<std::vector<FamilyEntry>>& entries() const { return entries_; }
  bool exact_lift() const { return exact_; }
  const std::optional<int>& declared_det_valuation() const { return declared_d_; }

  /// Entries reduced mod p as polynomials over F_q.
  std::vector<std::vector<BasePoly>> mod_p() const;
  std::string describe() const;

 private:
  std::string name_;
  int n_;
  const WittRing* ring_;
  int params_;
  std::vector<std::vector<FamilyEntry>> entries_;
  bool exact_;
  std::optional<int> declared_d_;
};

/// The declared det valuation, or the one of the fiber at the origin.
int family_det_valuation(const CrystalFamily& f);

/// Fiber at a point of K^k (K = field of the coordinates, the base field when
/// k = 0). Exact families are evaluated at a precision that certifies the
/// Newton polygon over K. NotIsogenyAtPoint when v(det) differs from the
/// family's value.
Crystal fiber(const CrystalFamily& f, const std::vector<FFElem>& point);

/// The E1 system of the family, with coefficients in F_q[t_1..t_k].
ASSystem family_E1_system(const CrystalFamily& f);

/// Points of F_{q^m}^k in index order (mixed radix, first coordinate fastest).
std::vector<std::vector<FFElem>> affine_points(const CrystalFamily& f, int m);

struct SweepOptions {
  int max_m = 4;
  bool newton = true;
  bool prank = true;
  bool as_counts = false;
  std::vector<BreakPoint> breaks;
  u64 budget = u64{1} << 20;  // total number of points over all m
};

struct PointData {
  int m = 0;
  std::vector<u64> coords;  // enumeration indices in F_{q^m}
  std::optional<NewtonPolygon> newton;
  int prank = -1;
  int as_log = -1;  // log_p of the geometric E1 fiber count
  std::vector<bool> breaks;  // membership in T_(a,b), in option order
};

/// Keys are "newton:{...}", "prank:m", "break:a,b" and "as:l".
struct Stratum {
  std::string key;
  std::vector<u64> counts;  // counts[m-1] = number of F_{q^m}-points
};

struct StrataReport {
  std::string family;
  u64 q = 0;
  int params = 0;
  int max_m = 0;
  std::vector<Stratum> strata;  // sorted by key
  std::vector<PointData> points;

  const Stratum* find(const std::string& key) const;
};

std::string newton_key(const NewtonPolygon& nu);
std::string prank_key(int m);
std::string break_key(const BreakPoint& bp);
std::string as_key(int log_p);

/// Every point of F_{q^m}^k for m = 1..max_m. BudgetExceeded if the total
/// exceeds opts.budget; NotIsogenyAtPoint propagates from invalid fibers.
StrataReport sweep(const CrystalFamily& f, const SweepOptions& opts);

struct DimensionEstimate {
  double value = 0;
  bool confident = false;
  int m1 = 0, m2 = 0;
};

/// log_q(N_{m2} / N_{m1}) / (m2 - m1) over the two largest degrees with a
/// nonzero count; confident when within 0.2 of an integer. InsufficientData
/// with fewer than two such degrees.
DimensionEstimate estimate_dimension(const StrataReport& report, const std::string& key);
DimensionEstimate estimate_dimension(u64 q, const std::vector<u64>& counts);

inline constexpr double kDimensionTolerance = 0.2;

struct PurityReport {
  std::string target;
  bool pass = false;
  bool boundary_empty = false;
  std::optional<DimensionEstimate> target_dim, closure_dim, boundary_dim;
  double codimension = 0;  // closure_dim - boundary_dim when the boundary is nonempty
  std::vector<u64> closure_counts, boundary_counts;
  std::string message;
};

/// Closure of the target stratum by the semicontinuity order (p-rank <= m for
/// "prank:m", polygons above nu for "newton:nu"); PASS when the boundary is
/// empty or its codimension in the closure is confidently 1.
PurityReport purity_report(const CrystalFamily& f, const std::string& target, int max_m);
PurityReport purity_report(const StrataReport& sweep_result, const std::string& target);

struct CheckReport {
  bool pass = true;
  std::string message;
  std::vector<std::string> details;
};

/// Generic polygon, everything above it, cofinite genericity for k = 1 and
/// constancy of v(det).
CheckReport semicontinuity_check(const CrystalFamily& f, int max_m);

/// x in S_nu iff nu_x above nu and every break point of nu is one of nu_x.
CheckReport strata_intersection_Snu(const CrystalFamily& f, const NewtonPolygon& nu, int max_m);

/// Each point in one S_nu and one S_m, and T_(a,b) equal to the union of the
/// S_nu having (a,b) as a break point.
CheckReport partition_check(const StrataReport& report, const std::vector<BreakPoint>& breaks);

/// E1 fiber counts against p-ranks: p^{n m} at every point, with the largest
/// exponent equal to n times the generic p-rank.
CheckReport as_prank_equivalence(const CrystalFamily& f, int max_m);

/// Families shipped with the library: "legendre-2", "legendre-3",
/// "legendre-4-n2", "ordinary-constant", "supersingular-constant",
/// "triangular-2param".
std::vector<CrystalFamily> shipped_families();
CrystalFamily shipped_family(const std::string& name);

/// Largest m <= 8 with q^{m k} <= per_level_cap.
int default_max_m(const CrystalFamily& f, u64 per_level_cap = u64{1} << 13);

/// Worker count from CRYSTAL_STRATA_THREADS, else the hardware concurrency.
int worker_count();

/// Calls fn(i) for i in [0, n) on worker_count() threads; exceptions are
/// rethrown for the smallest failing index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cstrata
