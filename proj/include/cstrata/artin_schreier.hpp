#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cstrata/crystal.hpp"
#include "cstrata/field_tower.hpp"

namespace cstrata {

/// Polynomial in t_1..t_k over the base field F_q.
class BasePoly {
 public:
  struct Term {
    std::vector<int> exponents;  // one per parameter
    FFElem coeff;
  };

  BasePoly() = default;
  BasePoly(int params, std::vector<Term> terms);
  static BasePoly constant(int params, const FFElem& c);

  int params() const { return params_; }
  const std::vector<Term>& terms() const { return terms_; }
  /// True when every coefficient is zero.
  bool is_zero() const;
  bool is_constant() const;
  /// Value at a point of K^k, where K contains the base field via `base_to_k`.
  FFElem eval(const std::vector<FFElem>& point, const Embedding& base_to_k) const;
  std::string str() const;

 private:
  int params_ = 0;
  std::vector<Term> terms_;
};

/// coeff * x_var^{p^exp}; exp >= 1.
struct ASTerm {
  int var = 0;
  int exp = 1;
  BasePoly coeff;
};

/// x_i = sum of terms + constant.
struct ASEquation {
  std::vector<ASTerm> terms;
  BasePoly constant;
};

struct ASSystem {
  FieldPtr base;
  int params = 0;
  std::vector<ASEquation> equations;  // equation i defines x_i

  u64 p() const { return base->p(); }
  int vars() const { return static_cast<int>(equations.size()); }
  std::string describe() const;
};

/// MalformedSystem on out-of-range variables, exponents < 1 or parameter
/// arity mismatches.
void validate(const ASSystem& sys);

/// Largest exponent m over terms with a nonzero coefficient (0 if none).
int degree(const ASSystem& sys);

/// Replaces every x_j^{p^m}, m >= 2, by y^p along a chain y_1 = x_j^p,
/// y_{l+1} = y_l^p. The original variables keep their indices; the result has
/// degree <= 1 and solutions project bijectively onto the original ones.
ASSystem reduce_degree(const ASSystem& sys);

/// x_i = sum_j abar_{ij} x_j^{p^n}, i.e. phi(z) = z for z = sum x_i v_i.
ASSystem as_system_from_matrix(const FieldPtr& base, int params,
                               const std::vector<std::vector<BasePoly>>& abar, int n);
ASSystem from_crystal_E1(const Crystal& c);

struct FiberCount {
  bool solvable = false;  // false: no solutions over the field considered
  int log_p = 0;          // count = p^log_p when solvable
  int field_degree = 0;   // absolute degree of the field the count refers to
                          // (0 for geometric counts)
  int confirmed_degree = 0;  // geometric counts: degree at which a flattened
                             // count reached the geometric one (0 if not asked)

  /// The count itself; TooLarge if it does not fit in 64 bits.
  u64 count(u64 p) const;
};

/// Solutions over F_{q^field_exp} at a point of K^k (K = the field of the
/// point's coordinates, or the base field when k = 0), by flattening to an
/// affine F_p-linear system. DegreeMismatch unless K embeds in the target.
FiberCount count_solutions(const ASSystem& sys, const std::vector<FFElem>& point, int field_exp);

struct GeometricOptions {
  /// Also count over F_{q^{m j}} for j = 1, 2, ... until the count reaches
  /// the geometric value; NoStabilization if the extension cap or the largest
  /// representable field is reached first.
  bool confirm = false;
  int max_extension = 1024;
};

/// Number of geometric points of the fiber: p^rho with rho the stable rank of
/// the p-linear part x -> A x^p of the reduced system.
FiberCount geometric_count(const ASSystem& sys, const std::vector<FFElem>& point,
                           const GeometricOptions& opts = {});

/// log_p of the geometric solution count of the E1 system, divided by n.
int p_rank_via_E1(const Crystal& c, const GeometricOptions& opts = {});

/// d/dx_j of x_i - sum P_ij(x_j^p) is delta_ij; checked term by term.
bool jacobian_is_identity(const ASSystem& sys);

}  // namespace cstrata
