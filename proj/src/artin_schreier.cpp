#include "cstrata/artin_schreier.hpp"

#include <map>
#include <sstream>

#include "cstrata/error.hpp"
#include "cstrata/linalg.hpp"

namespace cstrata {

namespace {

struct SpecialTerm {
  int eq;
  int var;
  int exp;
  FFElem coeff;
};

// The system with its coefficients evaluated at a point of K^k.
struct Specialized {
  FieldPtr field;
  int vars = 0;
  std::vector<SpecialTerm> terms;
  std::vector<FFElem> constants;
};

Specialized specialize(const ASSystem& sys, const std::vector<FFElem>& point) {
  validate(sys);
  if (static_cast<int>(point.size()) != sys.params)
    fail(ErrorKind::InvalidInput, "point has " + std::to_string(point.size()) + " coordinates, expected " +
                                      std::to_string(sys.params));
  Specialized out;
  out.field = point.empty() ? sys.base : shared_field(point[0].field());
  for (const auto& x : point)
    if (x.field_ptr() != out.field.get()) fail(ErrorKind::DegreeMismatch, "point coordinates lie in different fields");
  const Embedding e = make_embedding(sys.base, out.field);
  out.vars = sys.vars();
  for (int i = 0; i < sys.vars(); ++i) {
    const ASEquation& eq = sys.equations[i];
    for (const auto& t : eq.terms) {
      FFElem c = t.coeff.eval(point, e);
      if (!c.is_zero()) out.terms.push_back({i, t.var, t.exp, c});
    }
    out.constants.push_back(eq.constant.eval(point, e));
  }
  return out;
}

}  // namespace

BasePoly::BasePoly(int params, std::vector<Term> terms) : params_(params), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (static_cast<int>(t.exponents.size()) != params_)
      fail(ErrorKind::MalformedSystem, "monomial arity does not match the number of parameters");
    else
      for (int e : t.exponents)
        if (e < 0) fail(ErrorKind::MalformedSystem, "negative parameter exponent");
}

BasePoly BasePoly::constant(int params, const FFElem& c) {
  if (c.is_zero()) return BasePoly(params, {});
  return BasePoly(params, {Term{std::vector<int>(params, 0), c}});
}

bool BasePoly::is_zero() const {
  // Terms are not merged, so compare the collected coefficients per monomial.
  std::map<std::vector<int>, FFElem> sum;
  for (const auto& t : terms_) {
    auto it = sum.find(t.exponents);
    if (it == sum.end()) sum.emplace(t.exponents, t.coeff);
    else it->second += t.coeff;
  }
  for (const auto& [m, c] : sum)
    if (!c.is_zero()) return false;
  return true;
}

bool BasePoly::is_constant() const {
  for (const auto& t : terms_)
    for (int e : t.exponents)
      if (e != 0 && !t.coeff.is_zero()) return false;
  return true;
}

FFElem BasePoly::eval(const std::vector<FFElem>& point, const Embedding& base_to_k) const {
  const FiniteField& K = *base_to_k.target;
  FFElem acc = K.zero();
  for (const auto& t : terms_) {
    if (t.coeff.field_ptr() != base_to_k.source.get())
      fail(ErrorKind::DegreeMismatch, "coefficient does not lie in the base field");
    FFElem v = embed(base_to_k, t.coeff);
    for (int i = 0; i < params_; ++i)
      if (t.exponents[i] > 0) v *= point.at(i).pow(static_cast<u64>(t.exponents[i]));
    acc += v;
  }
  return acc;
}

std::string BasePoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (k) os << " + ";
    const auto& t = terms_[k];
    os << "[" << t.coeff.index() << "]";
    for (int i = 0; i < params_; ++i)
      if (t.exponents[i] == 1) os << "*t" << i + 1;
      else if (t.exponents[i] > 1) os << "*t" << i + 1 << "^" << t.exponents[i];
  }
  return os.str();
}

std::string ASSystem::describe() const {
  std::ostringstream os;
  for (int i = 0; i < vars(); ++i) {
    os << "x" << i + 1 << " =";
    const auto& eq = equations[i];
    for (const auto& t : eq.terms) os << " (" << t.coeff.str() << ")*x" << t.var + 1 << "^(p^" << t.exp << ") +";
    os << " " << eq.constant.str() << "\n";
  }
  return os.str();
}

void validate(const ASSystem& sys) {
  if (!sys.base) fail(ErrorKind::MalformedSystem, "system has no base field");
  auto check_poly = [&](const BasePoly& c) {
    if (!c.terms().empty() && c.params() != sys.params)
      fail(ErrorKind::MalformedSystem, "coefficient arity does not match the number of parameters");
  };
  for (const auto& eq : sys.equations) {
    for (const auto& t : eq.terms) {
      if (t.var < 0 || t.var >= sys.vars()) fail(ErrorKind::MalformedSystem, "variable index out of range");
      if (t.exp < 1) fail(ErrorKind::MalformedSystem, "monomial exponent is not a power of p");
      check_poly(t.coeff);
    }
    check_poly(eq.constant);
  }
}

int degree(const ASSystem& sys) {
  validate(sys);
  int e = 0;
  for (const auto& eq : sys.equations)
    for (const auto& t : eq.terms)
      if (!t.coeff.is_zero()) e = std::max(e, t.exp);
  return e;
}

ASSystem reduce_degree(const ASSystem& sys) {
  validate(sys);
  ASSystem out = sys;
  const FFElem one = sys.base->one();
  const BasePoly unit = BasePoly::constant(sys.params, one);
  std::map<int, std::vector<int>> chains;  // chains[j][l] = variable equal to x_j^{p^{l+1}}
  auto chain_var = [&](int j, int level) {
    auto& ch = chains[j];
    while (static_cast<int>(ch.size()) < level) {
      const int prev = ch.empty() ? j : ch.back();
      ASEquation eq;
      eq.terms.push_back({prev, 1, unit});
      out.equations.push_back(eq);
      ch.push_back(out.vars() - 1);
    }
    return ch[level - 1];
  };
  for (int i = 0; i < sys.vars(); ++i)
    for (std::size_t k = 0; k < sys.equations[i].terms.size(); ++k) {
      const ASTerm t = sys.equations[i].terms[k];
      if (t.exp < 2) continue;
      const int y = chain_var(t.var, t.exp - 1);
      out.equations[i].terms[k] = ASTerm{y, 1, t.coeff};
    }
  return out;
}

ASSystem as_system_from_matrix(const FieldPtr& base, int params, const std::vector<std::vector<BasePoly>>& abar,
                               int n) {
  if (n < 1) fail(ErrorKind::InvalidInput, "Frobenius exponent must be positive");
  ASSystem sys;
  sys.base = base;
  sys.params = params;
  const int r = static_cast<int>(abar.size());
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(abar[i].size()) != r) fail(ErrorKind::MalformedSystem, "matrix is not square");
    ASEquation eq;
    for (int j = 0; j < r; ++j)
      if (!abar[i][j].is_zero()) eq.terms.push_back({j, n, abar[i][j]});
    sys.equations.push_back(eq);
  }
  validate(sys);
  return sys;
}

ASSystem from_crystal_E1(const Crystal& c) {
  const FFMatrix a = reduce_mod_p(c.matrix());
  std::vector<std::vector<BasePoly>> abar(c.rank(), std::vector<BasePoly>(c.rank()));
  for (int i = 0; i < c.rank(); ++i)
    for (int j = 0; j < c.rank(); ++j) abar[i][j] = BasePoly::constant(0, a(i, j));
  return as_system_from_matrix(c.ring().field(), 0, abar, c.n());
}

u64 FiberCount::count(u64 p) const {
  if (!solvable) return 0;
  u64 v = 1;
  for (int i = 0; i < log_p; ++i) {
    if (v > ~u64{0} / p) fail(ErrorKind::TooLarge, "count exceeds 64 bits");
    v *= p;
  }
  return v;
}

FiberCount count_solutions(const ASSystem& sys, const std::vector<FFElem>& point, int field_exp) {
  if (field_exp < 1) fail(ErrorKind::InvalidInput, "field exponent must be positive");
  const Specialized sp = specialize(sys, point);
  const u64 p = sys.p();
  const FieldPtr L = make_field(p, sys.base->deg() * field_exp);
  const Embedding to_l = make_embedding(sp.field, L);
  const int D = L->deg();
  const int r = sp.vars;

  std::vector<FFElem> basis;
  for (int l = 0; l < D; ++l) {
    std::vector<u64> c(D, 0);
    c[l] = 1;
    basis.push_back(L->from_coeffs(c));
  }
  std::map<int, std::vector<FFElem>> frob_basis;
  auto frob = [&](int exp) -> const std::vector<FFElem>& {
    auto it = frob_basis.find(exp);
    if (it != frob_basis.end()) return it->second;
    std::vector<FFElem> v;
    for (const auto& b : basis) v.push_back(frobenius(b, static_cast<u64>(exp)));
    return frob_basis.emplace(exp, std::move(v)).first->second;
  };

  // x_i - sum c x_j^{p^m} = const, one block of D rows per equation.
  ModMatrix m(p, r * D, r * D);
  std::vector<u64> rhs(static_cast<std::size_t>(r) * D, 0);
  for (int i = 0; i < r; ++i)
    for (int l = 0; l < D; ++l) m(i * D + l, i * D + l) = 1;
  for (const auto& t : sp.terms) {
    const FFElem c = embed(to_l, t.coeff);
    const auto& fb = frob(t.exp);
    for (int l = 0; l < D; ++l) {
      const FFElem y = c * fb[l];
      for (int k = 0; k < D; ++k) {
        u64& cell = m(t.eq * D + k, t.var * D + l);
        cell = (cell + p - y.coeff(k)) % p;
      }
    }
  }
  for (int i = 0; i < r; ++i) {
    const FFElem c = embed(to_l, sp.constants[i]);
    for (int k = 0; k < D; ++k) rhs[static_cast<std::size_t>(i) * D + k] = c.coeff(k);
  }
  const AffineSolution sol = solve_affine_mod_p(std::move(m), std::move(rhs));
  FiberCount out;
  out.solvable = sol.consistent;
  out.log_p = sol.consistent ? sol.kernel_dim : 0;
  out.field_degree = D;
  return out;
}

FiberCount geometric_count(const ASSystem& sys, const std::vector<FFElem>& point, const GeometricOptions& opts) {
  const ASSystem red = reduce_degree(sys);
  const Specialized sp = specialize(red, point);
  const int r = sp.vars;
  int rho = 0;
  if (r > 0) {
    FFMatrix a(*sp.field, r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) a(i, j) = sp.field->zero();
    for (const auto& t : sp.terms) a(t.eq, t.var) += t.coeff;
    // phi(x) = A x^p; phi^r has matrix A sigma(A) ... sigma^{r-1}(A) and its
    // rank is the dimension of the part on which phi is bijective.
    FFMatrix power = a;
    for (int k = 1; k < r; ++k) power = a * power.frobenius(1);
    rho = rank(power);
  }
  FiberCount out;
  out.solvable = true;
  out.log_p = rho;
  if (!opts.confirm) return out;

  const int dq = sys.base->deg();
  const int m0 = sp.field->deg() / dq;
  // Every extension degree is tried, not only doublings: solutions defined
  // over a cubic extension never appear in a 2-power tower.
  for (int mult = 1;; ++mult) {
    if (mult > opts.max_extension || dq * m0 * mult > detail::kMaxDegree)
      fail(ErrorKind::NoStabilization, "flattened counts did not reach p^" + std::to_string(rho) +
                                           " below extension degree " + std::to_string(dq * m0 * mult));
    const FiberCount c = count_solutions(sys, point, m0 * mult);
    if (c.solvable && c.log_p > rho)
      fail(ErrorKind::BackendMismatch, "rational solutions exceed the geometric count");
    if (c.solvable && c.log_p == rho) {
      out.confirmed_degree = c.field_degree;
      return out;
    }
  }
}

int p_rank_via_E1(const Crystal& c, const GeometricOptions& opts) {
  const FiberCount g = geometric_count(from_crystal_E1(c), {}, opts);
  if (g.log_p % c.n() != 0)
    fail(ErrorKind::BackendMismatch, "E1 solution count is not a power of p^n");
  return g.log_p / c.n();
}

bool jacobian_is_identity(const ASSystem& sys) {
  validate(sys);
  const u64 p = sys.p();
  for (int i = 0; i < sys.vars(); ++i) {
    // d/dx_j (coeff x_j^{p^m}) = (p^m mod p) coeff x_j^{p^m - 1}.
    std::vector<bool> nonzero(sys.vars(), false);
    for (const auto& t : sys.equations[i].terms) {
      u64 mult = 1;
      for (int k = 0; k < t.exp; ++k) mult = (mult * p) % p;
      if (mult != 0 && !t.coeff.is_zero()) nonzero[t.var] = true;
    }
    for (int j = 0; j < sys.vars(); ++j)
      if (nonzero[j]) return false;
  }
  return true;
}

}  // namespace cstrata
