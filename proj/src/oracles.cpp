#include "cstrata/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include "cstrata/artin_schreier.hpp"
#include "cstrata/crystal.hpp"
#include "cstrata/error.hpp"
#include "cstrata/family_strata.hpp"
#include "cstrata/linalg.hpp"
#include "cstrata/newton_polygon.hpp"
#include "cstrata/witt_ring.hpp"

namespace cstrata {

namespace {

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void record(OracleReport& rep, const std::string& witness) {
  ++rep.failure_count;
  if (rep.failures.size() < kMaxWitnesses) rep.failures.push_back(witness);
}

void merge(OracleReport& into, const OracleReport& from) {
  into.cases += from.cases;
  into.failure_count += from.failure_count;
  for (const auto& f : from.failures)
    if (into.failures.size() < kMaxWitnesses) into.failures.push_back(f);
  into.notes.insert(into.notes.end(), from.notes.begin(), from.notes.end());
  into.seconds += from.seconds;
}

std::string show(const std::vector<Rational>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + to_string(s[i]);
  return out + "}";
}

std::string show(const WittMatrix& m) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < m.rows(); ++i) {
    os << (i ? ";" : "");
    for (int j = 0; j < m.cols(); ++j) {
      os << (j ? "," : "") << "(";
      for (int k = 0; k < m.ring().deg(); ++k) os << (k ? " " : "") << m(i, j).coeff(k);
      os << ")";
    }
  }
  os << "] over " << m.ring().describe();
  return os.str();
}

// ---- polygons, computed from slope lists without the library's helpers ----

// Valid polygons of rank r as sorted slope lists: maximal segments (len, h)
// with strictly increasing slopes h/len <= max_slope.
void for_each_valid_polygon(int r, int max_slope, const std::function<void(const std::vector<Rational>&)>& fn) {
  std::vector<Rational> cur;
  std::function<void(int, Rational, bool)> rec = [&](int left, Rational last, bool started) {
    if (left == 0) {
      fn(cur);
      return;
    }
    for (int len = 1; len <= left; ++len)
      for (int h = 0; h <= max_slope * len; ++h) {
        const Rational slope(h, len);
        if (started && slope <= last) continue;
        for (int i = 0; i < len; ++i) cur.push_back(slope);
        rec(left - len, slope, true);
        cur.resize(cur.size() - len);
      }
  };
  rec(r, Rational(0), false);
}

std::vector<Rational> subset_sums(const std::vector<Rational>& s, int a) {
  std::vector<Rational> out;
  const int r = static_cast<int>(s.size());
  std::vector<int> idx(a);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Rational sum(0);
    for (int i : idx) sum += s[i];
    out.push_back(sum);
    int k = a - 1;
    while (k >= 0 && idx[k] == r - a + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < a; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool vertex_at(const std::vector<Rational>& s, int a) {
  if (a == 0 || a == static_cast<int>(s.size())) return true;
  return s[a - 1] < s[a];
}

std::vector<Rational> cumulative(const std::vector<Rational>& s) {
  std::vector<Rational> out{Rational(0)};
  for (const auto& x : s) out.push_back(out.back() + x);
  return out;
}

bool above(const std::vector<Rational>& s, const std::vector<Rational>& t) {
  const auto a = cumulative(s), b = cumulative(t);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

// ---- Z/p^s arithmetic for the cokernel oracle ----

struct ModRing {
  u64 p, m;
  int s;
  u64 mul(u64 a, u64 b) const { return a * b % m; }
  u64 sub(u64 a, u64 b) const { return (a + m - b) % m; }
  int val(u64 a) const {
    if (a % m == 0) return s;
    int v = 0;
    while (a % p == 0) a /= p, ++v;
    return v;
  }
  u64 inv(u64 u) const {
    for (u64 x = 1; x < m; ++x)
      if (mul(u, x) == 1) return x;
    fail(ErrorKind::PreconditionViolated, "not a unit");
  }
};

using IntMatrix = std::vector<std::vector<u64>>;

// Elementary-divisor exponents (s for vanishing ones), ascending.
std::vector<int> elementary_divisors(IntMatrix a, const ModRing& R) {
  const int r = static_cast<int>(a.size());
  std::vector<int> out;
  for (int k = 0; k < r; ++k) {
    int bi = -1, bj = -1, bv = R.s;
    for (int i = k; i < r; ++i)
      for (int j = k; j < r; ++j)
        if (R.val(a[i][j]) < bv) bv = R.val(a[i][j]), bi = i, bj = j;
    if (bi < 0) {
      for (; k < r; ++k) out.push_back(R.s);
      break;
    }
    std::swap(a[k], a[bi]);
    for (auto& row : a) std::swap(row[k], row[bj]);
    u64 pv = 1;
    for (int t = 0; t < bv; ++t) pv *= R.p;
    const u64 uinv = R.inv(a[k][k] / pv % R.m);
    for (int i = k + 1; i < r; ++i) {
      const u64 f = R.mul(a[i][k] / pv, uinv);
      for (int j = k; j < r; ++j) a[i][j] = R.sub(a[i][j], R.mul(f, a[k][j]));
    }
    for (int j = k + 1; j < r; ++j) {
      const u64 f = R.mul(a[k][j] / pv, uinv);
      for (int i = k; i < r; ++i) a[i][j] = R.sub(a[i][j], R.mul(f, a[i][k]));
    }
    out.push_back(bv);
  }
  std::sort(out.begin(), out.end());
  return out;
}

u64 det_mod(const IntMatrix& a, const ModRing& R) {
  const int r = static_cast<int>(a.size());
  if (r == 1) return a[0][0] % R.m;
  u64 acc = 0;
  for (int j = 0; j < r; ++j) {
    IntMatrix minor;
    for (int i = 1; i < r; ++i) {
      minor.emplace_back();
      for (int k = 0; k < r; ++k)
        if (k != j) minor.back().push_back(a[i][k]);
    }
    const u64 term = R.mul(a[0][j], det_mod(minor, R));
    acc = j % 2 ? R.sub(acc, term) : (acc + term) % R.m;
  }
  return acc;
}

IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b, const ModRing& R) {
  const int r = static_cast<int>(a.size());
  IntMatrix c(r, std::vector<u64>(r, 0));
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k)
      for (int j = 0; j < r; ++j) c[i][j] = (c[i][j] + R.mul(a[i][k], b[k][j])) % R.m;
  return c;
}

// ---- Witt matrices ----

WittElement random_element(const WittRing& R, std::mt19937_64& rng) {
  std::vector<u64> c(R.deg());
  for (auto& x : c) x = rng() % R.modulus();
  return R.from_coeffs(c);
}

WittMatrix random_matrix(const WittRing& R, int r, std::mt19937_64& rng, int shift_odds) {
  WittMatrix m(R, r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      WittElement x = random_element(R, rng);
      if (shift_odds > 0 && rng() % shift_odds == 0) x = x.times_p_power(1);
      m(i, j) = x;
    }
  return m;
}

WittMatrix random_unimodular(const WittRing& R, int r, std::mt19937_64& rng) {
  while (true) {
    WittMatrix m = random_matrix(R, r, rng, 0);
    if (determinant(m).is_unit()) return m;
  }
}

// Coordinate descent: zero entries, then drop their higher Witt digits, while
// the failure persists.
WittMatrix shrink(WittMatrix m, const std::function<bool(const WittMatrix&)>& fails) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      for (const WittElement& cand : {m.ring().zero(), m.ring().lift(m.ring().reduce(m(i, j)))}) {
        if (cand == m(i, j)) continue;
        WittMatrix t = m;
        t(i, j) = cand;
        bool still = false;
        try {
          still = fails(t);
        } catch (const Error&) {
        }
        if (still) {
          m = t;
          break;
        }
      }
    }
  return m;
}

// Elementary-divisor exponents over W_s by min-valuation pivoting.
std::vector<int> witt_elementary_divisors(WittMatrix a) {
  const WittRing& R = a.ring();
  const int r = a.rows();
  std::vector<int> out;
  for (int k = 0; k < r; ++k) {
    int bi = -1, bj = -1;
    Valuation bv = Valuation::infinite();
    for (int i = k; i < r; ++i)
      for (int j = k; j < r; ++j)
        if (a(i, j).valuation() < bv) bv = a(i, j).valuation(), bi = i, bj = j;
    if (bi < 0) {
      for (; k < r; ++k) out.push_back(R.s());
      break;
    }
    for (int j = 0; j < r; ++j) std::swap(a(k, j), a(bi, j));
    for (int i = 0; i < r; ++i) std::swap(a(i, k), a(i, bj));
    const int v = bv.value();
    const WittElement uinv = a(k, k).divide_p_power(v).inverse();
    for (int i = k + 1; i < r; ++i) {
      const WittElement f = a(i, k).divide_p_power(v) * uinv;
      for (int j = k; j < r; ++j) a(i, j) = a(i, j) - f * a(k, j);
    }
    for (int j = k + 1; j < r; ++j) {
      const WittElement f = a(k, j).divide_p_power(v) * uinv;
      for (int i = k; i < r; ++i) a(i, j) = a(i, j) - f * a(i, k);
    }
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct RandomCrystalSpec {
  std::vector<u64> primes{2, 3};
  int max_r = 4;
  int s = 4;
  int shift_odds = 4;
};

Crystal random_crystal(std::mt19937_64& rng, const RandomCrystalSpec& spec) {
  const u64 p = spec.primes[rng() % spec.primes.size()];
  const int deg = 1 + static_cast<int>(rng() % 2);
  const int n = 1 + static_cast<int>(rng() % 2);
  const int r = 1 + static_cast<int>(rng() % spec.max_r);
  const WittRing& R = witt_ring(make_field(p, deg), spec.s);
  return Crystal(n, random_matrix(R, r, rng, spec.shift_odds));
}

std::vector<Rational> slopes_of(const NewtonPolygon& nu) { return nu.slopes(); }

}  // namespace

OracleReport lemma1_oracle(int max_r, int max_slope) {
  Timer timer;
  OracleReport rep;
  rep.name = "lemma1";
  for (int r = 2; r <= max_r; ++r)
    for_each_valid_polygon(r, max_slope, [&](const std::vector<Rational>& s) {
      const NewtonPolygon nu = NewtonPolygon::from_slopes(s);
      const auto cum = cumulative(s);
      for (int a = 1; a < r; ++a) {
        ++rep.cases;
        const Rational b = cum[a];
        const auto w = subset_sums(s, a);
        const bool lhs = vertex_at(s, a);
        const bool rhs = w[0] == b && vertex_at(w, 1);
        const std::string tag = show(s) + " a=" + std::to_string(a);
        if (lhs != rhs) record(rep, tag + ": vertex " + std::to_string(lhs) + " but exterior vertex " + std::to_string(rhs));
        if (w[1] - w[0] != s[a] - s[a - 1]) record(rep, tag + ": beta_2 - beta_1 != alpha_{a+1} - alpha_a");
        const NewtonPolygon ext = exterior_power(nu, a);
        if (ext.slopes() != w) record(rep, tag + ": exterior_power gives " + ext.str());
        if (b.denominator() == 1) {
          const BreakPoint bp{a, b.numerator()};
          if (has_break(nu, bp) != lhs) record(rep, tag + ": has_break disagrees on nu");
          if (has_break(ext, BreakPoint{1, b.numerator()}) != rhs) record(rep, tag + ": has_break disagrees on the exterior power");
        } else if (lhs) {
          record(rep, tag + ": vertex at a non-integral height");
        }
      }
    });
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport fact1_oracle(u64 p, int max_s, int max_r, int per_config, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "fact1";
  std::mt19937_64 rng(seed * 1000003 + p);
  constexpr u64 kVectorCap = 4096;
  u64 exhaustive = 0, sampled = 0;
  for (int s = 1; s <= max_s; ++s)
    for (int r = 1; r <= max_r; ++r) {
      ModRing R{p, 1, s};
      for (int i = 0; i < s; ++i) R.m *= p;
      const WittRing& W = witt_ring(make_field(p, 1), s);
      auto random_int_matrix = [&] {
        IntMatrix g(r, std::vector<u64>(r));
        for (auto& row : g)
          for (auto& x : row) x = rng() % R.m;
        return g;
      };
      auto unimodular = [&] {
        while (true) {
          IntMatrix u = random_int_matrix();
          if (det_mod(u, R) % p != 0) return u;
        }
      };
      int certified = 0;
      while (certified < per_config) {
        IntMatrix g;
        if (certified % 2 == 0) {
          g = random_int_matrix();
        } else {
          IntMatrix d(r, std::vector<u64>(r, 0));
          for (int i = 0; i < r; ++i) {
            u64 pv = 1;
            for (int k = static_cast<int>(rng() % s); k > 0; --k) pv *= p;
            d[i][i] = pv % R.m;
          }
          g = int_mul(int_mul(unimodular(), d, R), unimodular(), R);
        }
        const auto ed = elementary_divisors(g, R);
        if (ed.back() >= s) continue;  // cokernel not killed by p^t with t < s
        ++certified;
        const int t = ed.back();
        WittMatrix gw(W, r, r);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) gw(i, j) = W.from_int(static_cast<std::int64_t>(g[i][j]));
        std::vector<int> lib;
        for (const auto& v : smith_form(gw).exponents) lib.push_back(v.finite() ? v.value() : s);
        std::sort(lib.begin(), lib.end());
        if (lib != ed) record(rep, "smith_form exponents disagree for a " + std::to_string(r) + "x" + std::to_string(r) + " matrix");

        u64 mod_t = 1;
        for (int k = 0; k <= t; ++k) mod_t *= p;
        auto check = [&](const std::vector<u64>& x) {
          ++rep.cases;
          bool nonzero = false;
          for (int i = 0; i < r && !nonzero; ++i) {
            u64 acc = 0;
            for (int j = 0; j < r; ++j) acc = (acc + R.mul(g[i][j], x[j])) % R.m;
            nonzero = acc % mod_t != 0;
          }
          if (!nonzero) {
            std::ostringstream os;
            os << "p=" << p << " s=" << s << " t=" << t << ": primitive x = (";
            for (int j = 0; j < r; ++j) os << (j ? "," : "") << x[j];
            os << ") maps into p^" << t + 1;
            record(rep, os.str());
          }
        };
        u64 total = 1;
        for (int k = 0; k < r; ++k) total *= mod_t;
        if (total <= kVectorCap) {
          // g(x) mod p^{t+1} only depends on x mod p^{t+1}.
          ++exhaustive;
          for (u64 idx = 0; idx < total; ++idx) {
            std::vector<u64> x(r);
            u64 rest = idx;
            bool primitive = false;
            for (int j = 0; j < r; ++j) {
              x[j] = rest % mod_t;
              rest /= mod_t;
              primitive = primitive || x[j] % p != 0;
            }
            if (primitive) check(x);
          }
        } else {
          ++sampled;
          for (u64 k = 0; k < kVectorCap; ++k) {
            std::vector<u64> x(r);
            for (auto& c : x) c = rng() % R.m;
            if (std::all_of(x.begin(), x.end(), [&](u64 c) { return c % p == 0; })) x[rng() % r] += 1;
            check(x);
          }
        }
      }
    }
  rep.notes.push_back("p=" + std::to_string(p) + ": " + std::to_string(exhaustive) + " matrices checked on all primitive vectors, " +
                      std::to_string(sampled) + " on " + std::to_string(kVectorCap) + " sampled ones");
  rep.seconds = timer.seconds();
  return rep;
}

namespace {

u64 digit_add(u64 a, u64 b, u64 p) {
  if (p == 2) return a ^ b;
  u64 out = 0, place = 1;
  while (a || b) {
    out += ((a % p + b % p) % p) * place;
    a /= p;
    b /= p;
    place *= p;
  }
  return out;
}

// Element indices in powers of a primitive element, found by repeated
// multiplication; cached per field.
struct PowerTables {
  std::vector<u64> exp;  // exp[k] = index of g^k, k < N - 1
  std::vector<u64> log;  // log[index] for nonzero indices
};

const PowerTables& power_tables(const FieldPtr& L) {
  static std::mutex mu;
  static std::map<std::pair<u64, int>, PowerTables> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(L->p(), L->deg());
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const u64 order = L->cardinality() - 1;
  PowerTables t;
  for (u64 cand = 1;; ++cand) {
    const FFElem g = L->from_index(cand);
    t.exp.assign(1, L->one().index());
    FFElem x = g;
    while (!(x == L->one())) {
      t.exp.push_back(x.index());
      x = x * g;
    }
    if (t.exp.size() == order) break;
  }
  t.log.assign(order + 1, 0);
  for (u64 k = 0; k < order; ++k) t.log[t.exp[k]] = k;
  return cache.emplace(key, std::move(t)).first->second;
}

// Tuples of F_{q^m}^r satisfying every equation, by direct evaluation.
u64 enumerate_solutions(const ASSystem& sys, int m) {
  const u64 p = sys.p();
  const FieldPtr L = make_field(p, sys.base->deg() * m);
  const Embedding e = make_embedding(sys.base, L);
  const PowerTables& pt = power_tables(L);
  const u64 size = L->cardinality(), order = size - 1;
  const int r = sys.vars();
  struct Map {
    int var;
    std::vector<u64> image;
  };
  std::vector<std::vector<Map>> maps(r);
  std::vector<u64> constants(r);
  for (int i = 0; i < r; ++i) {
    for (const auto& t : sys.equations[i].terms) {
      const u64 c = t.coeff.eval({}, e).index();
      Map mp{t.var, std::vector<u64>(size, 0)};
      if (c != 0) {
        u64 q = 1;
        for (int k = 0; k < t.exp; ++k) q = q * p % order;
        for (u64 x = 1; x < size; ++x) mp.image[x] = pt.exp[(pt.log[c] + pt.log[x] * q) % order];
      }
      maps[i].push_back(std::move(mp));
    }
    constants[i] = sys.equations[i].constant.eval({}, e).index();
  }
  std::vector<u64> x(r, 0);
  u64 count = 0;
  while (true) {
    bool ok = true;
    for (int i = 0; i < r && ok; ++i) {
      u64 acc = constants[i];
      for (const auto& mp : maps[i]) acc = digit_add(acc, mp.image[x[mp.var]], p);
      ok = acc == x[i];
    }
    if (ok) ++count;
    int k = 0;
    while (k < r && ++x[k] == size) x[k++] = 0;
    if (k == r) break;
  }
  return count;
}

}  // namespace

OracleReport prop2_oracle(u64 p, int max_r, int trials, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "prop2";
  std::mt19937_64 rng(seed * 7919 + p);
  constexpr u64 kTupleCap = u64{1} << 16;
  int unconfirmed = 0, reduced = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const FieldPtr F = make_field(p, trial % 4 == 3 ? 2 : 1);
    const int r = 1 + static_cast<int>(rng() % max_r);
    ASSystem sys;
    sys.base = F;
    for (int i = 0; i < r; ++i) {
      ASEquation eq;
      const int nterms = static_cast<int>(rng() % 4);
      for (int k = 0; k < nterms; ++k)
        eq.terms.push_back({static_cast<int>(rng() % r), 1 + static_cast<int>(rng() % 2),
                            BasePoly::constant(0, F->from_index(rng() % F->cardinality()))});
      eq.constant = BasePoly::constant(0, F->from_index(rng() % F->cardinality()));
      sys.equations.push_back(eq);
    }
    const std::string tag = "system\n" + sys.describe();
    ++rep.cases;
    if (!jacobian_is_identity(sys)) record(rep, tag + "Jacobian is not the identity");
    const ASSystem red = reduce_degree(sys);
    if (degree(red) > 1) record(rep, tag + "reduction left degree > 1");
    if (degree(sys) > 1) ++reduced;
    const FiberCount geo = geometric_count(sys, {});
    u64 power = geo.count(p);
    while (power % p == 0) power /= p;
    if (!geo.solvable || power != 1) record(rep, tag + "geometric count is not a power of p");
    try {
      geometric_count(sys, {}, {.confirm = true});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoStabilization) ++unconfirmed;
      else record(rep, tag + e.what());
    }
    for (int m = 1;; ++m) {
      u64 tuples = 1;
      bool over = false;
      for (int k = 0; k < F->deg() * m * r && !over; ++k) {
        tuples *= p;
        over = tuples > kTupleCap;
      }
      if (over) break;
      const u64 brute = enumerate_solutions(sys, m);
      const u64 linear = count_solutions(sys, {}, m).count(p);
      const u64 linear_red = count_solutions(red, {}, m).count(p);
      if (brute != linear || brute != linear_red)
        record(rep, tag + "over degree " + std::to_string(m) + ": enumeration " + std::to_string(brute) +
                        ", linear algebra " + std::to_string(linear) + ", reduced " + std::to_string(linear_red));
      if (linear > geo.count(p)) record(rep, tag + "rational count exceeds the geometric count");
    }
  }
  rep.notes.push_back("p=" + std::to_string(p) + ": " + std::to_string(reduced) + " systems of degree 2 reduced; " +
                      std::to_string(unconfirmed) + " geometric counts not reached by a field of degree <= 32");
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport prank_crosscheck(u64 p, int random_samples, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "prank";
  std::mt19937_64 rng(seed * 104729 + p);
  u64 skipped = 0;
  auto compare = [&](const Crystal& c) -> std::optional<std::string> {
    NewtonPolygon nu;
    try {
      nu = newton_slopes(c);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotIsogeny) return std::nullopt;
      throw;
    }
    const int a = nu.multiplicity(Rational(0));
    const int b = p_rank_stable(c);
    const int e1 = p_rank_via_E1(c);
    if (a == b && b == e1) return std::string();
    return "n=" + std::to_string(c.n()) + " " + show(c.matrix()) + ": slope-0 multiplicity " + std::to_string(a) +
           ", stable rank " + std::to_string(b) + ", E1 count " + std::to_string(e1);
  };
  auto run = [&](const Crystal& c) {
    const auto res = compare(c);
    if (!res) {
      ++skipped;
      return;
    }
    ++rep.cases;
    if (res->empty()) return;
    const WittMatrix small = shrink(c.matrix(), [&](const WittMatrix& m) {
      const auto r2 = compare(Crystal(c.n(), m, c.exact_lift()));
      return r2 && !r2->empty();
    });
    record(rep, *compare(Crystal(c.n(), small, c.exact_lift())));
  };
  for (int deg = 1; deg <= 2; ++deg)
    for (int n = 1; n <= 2; ++n) {
      const FieldPtr F = make_field(p, deg);
      const WittRing& R = witt_ring(F, 4);
      const WittMatrix fixed = random_matrix(R, 2, rng, 0);
      const auto elems = enumerate(*F);
      const u64 q = elems.size();
      for (u64 idx = 0; idx < q * q * q * q; ++idx) {
        WittMatrix a(R, 2, 2);
        u64 rest = idx;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            a(i, j) = R.lift(elems[rest % q]) + fixed(i, j).times_p_power(1);
            rest /= q;
          }
        run(Crystal(n, a));
      }
    }
  RandomCrystalSpec spec;
  spec.primes = {p};
  for (int k = 0; k < random_samples; ++k) run(random_crystal(rng, spec));
  rep.notes.push_back("p=" + std::to_string(p) + ": " + std::to_string(skipped) + " samples with vanishing determinant skipped");
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport gk_semicontinuity_oracle() {
  Timer timer;
  OracleReport rep;
  rep.name = "gk";
  for (const auto& f : shipped_families()) {
    const int max_m = f.base()->cardinality() == 2 ? 8 : default_max_m(f);
    const CheckReport c = semicontinuity_check(f, max_m);
    ++rep.cases;
    if (!c.pass) record(rep, f.name() + ": " + c.message);
    else rep.notes.push_back(f.name() + " (max_m " + std::to_string(max_m) + "): " + c.details.front());
  }
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport functor_oracle(int trials, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "functor";
  std::mt19937_64 rng(seed * 15485863 + 5);
  RandomCrystalSpec spec;
  spec.max_r = 4;
  int attempts = 0, skipped = 0;
  while (static_cast<int>(rep.cases) < trials && attempts < 20 * trials) {
    ++attempts;
    const Crystal c = random_crystal(rng, spec);
    NewtonPolygon nu;
    try {
      nu = newton_slopes(c);
      const auto s = slopes_of(nu);
      std::vector<std::string> bad;
      for (int a = 1; a <= c.rank(); ++a) {
        const NewtonPolygon lhs = newton_slopes(exterior_power_crystal(c, a));
        if (lhs.slopes() != subset_sums(s, a) || lhs != exterior_power(nu, a))
          bad.push_back("exterior power " + std::to_string(a) + " has slopes " + lhs.str());
      }
      for (int q = 2; q <= 3; ++q) {
        std::vector<Rational> scaled;
        for (const auto& x : s) scaled.push_back(x * q);
        const NewtonPolygon lhs = newton_slopes(iterate_crystal(c, q));
        if (lhs.slopes() != scaled || lhs != scale_iterate(nu, q))
          bad.push_back("iterate " + std::to_string(q) + " has slopes " + lhs.str());
      }
      ++rep.cases;
      for (const auto& b : bad) record(rep, "n=" + std::to_string(c.n()) + " " + show(c.matrix()) + " with slopes " + nu.str() + ": " + b);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotIsogeny && e.kind() != ErrorKind::PrecisionTooLarge) throw;
      ++skipped;
    }
  }
  rep.notes.push_back(std::to_string(skipped) + " samples skipped (vanishing determinant or precision beyond 64 bits)");
  if (static_cast<int>(rep.cases) < trials) record(rep, "only " + std::to_string(rep.cases) + " usable samples");
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport mazur_oracle(int trials, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "mazur";
  std::mt19937_64 rng(seed * 32452843 + 11);
  RandomCrystalSpec spec;
  spec.shift_odds = 3;
  int attempts = 0;
  auto check = [&](const Crystal& c) -> std::optional<std::string> {
    const NewtonData nd = newton_data(c);
    const Crystal hi = c.at_precision(std::max(c.s(), nd.det_valuation + 2));
    const auto hodge = witt_elementary_divisors(hi.matrix());
    std::vector<Rational> h;
    for (int v : hodge) h.push_back(Rational(v));
    if (hodge_polygon(hi).slopes != hodge) return "hodge_polygon disagrees with elimination";
    if (!above(nd.polygon.slopes(), h)) return "Newton " + nd.polygon.str() + " below Hodge " + show(h);
    if (cumulative(h).back() != cumulative(nd.polygon.slopes()).back()) return "endpoints differ";
    return std::string();
  };
  while (static_cast<int>(rep.cases) < trials && attempts < 20 * trials) {
    ++attempts;
    const Crystal c = random_crystal(rng, spec);
    std::optional<std::string> res;
    try {
      res = check(c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotIsogeny) throw;
      continue;
    }
    ++rep.cases;
    if (res->empty()) continue;
    const WittMatrix small = shrink(c.matrix(), [&](const WittMatrix& m) {
      const auto r2 = check(Crystal(c.n(), m));
      return r2 && !r2->empty();
    });
    record(rep, show(small) + ": " + *check(Crystal(c.n(), small)));
  }
  if (static_cast<int>(rep.cases) < trials) record(rep, "only " + std::to_string(rep.cases) + " usable samples");
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport t_identity_oracle(int max_r, int max_d, int max_b) {
  Timer timer;
  OracleReport rep;
  rep.name = "t-identity";
  for (int r = 2; r <= max_r; ++r)
    for (int b = 0; b <= max_b; ++b) {
      std::vector<std::int64_t> s(r);
      std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int i, std::int64_t lo, std::int64_t sum) {
        if (i == r) {
          const std::int64_t d = sum;
          const std::int64_t last = d - b - std::int64_t(b + 1) * (r - 2);
          if (last < b + 1) return;
          std::vector<Rational> sv(s.begin(), s.end()), n1;
          n1.push_back(Rational(b));
          for (int k = 0; k < r - 2; ++k) n1.push_back(Rational(b + 1));
          n1.push_back(Rational(last));
          if (!above(sv, n1)) return;
          ++rep.cases;
          const bool direct = s[0] == b && s[1] > s[0];
          bool formula = true;
          if (std::int64_t(r) * (b + 1) <= d) {
            std::vector<Rational> n2(r - 1, Rational(b + 1));
            n2.push_back(Rational(d - std::int64_t(r - 1) * (b + 1)));
            formula = !above(sv, n2);
          }
          const NewtonPolygon nu = NewtonPolygon::from_integers(s);
          const std::string tag = nu.str() + " b=" + std::to_string(b);
          if (direct != formula) record(rep, tag + ": S_{>=nu1} - S_{>=nu2} differs from T_(1,b)");
          if (t_membership_via_nu(nu, b) != direct) record(rep, tag + ": t_membership_via_nu disagrees");
          if (has_break(nu, {1, b}) != direct) record(rep, tag + ": has_break disagrees");
          if (nu1(r, b, d).slopes() != n1) record(rep, tag + ": nu1 recipe differs");
          return;
        }
        for (std::int64_t v = lo; sum + v * (r - i) <= max_d; ++v) {
          s[i] = v;
          rec(i + 1, v, sum + v);
        }
      };
      rec(0, 0, 0);
    }
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport purity_oracle(int max_m) {
  Timer timer;
  OracleReport rep;
  rep.name = "purity";
  auto note = [&](const std::string& name, const PurityReport& pr) {
    rep.notes.push_back(name + " " + pr.target + ": " + pr.message);
  };
  {
    const PurityReport pr = purity_report(shipped_family("legendre-2"), prank_key(1), max_m);
    ++rep.cases;
    note("legendre-2", pr);
    if (!pr.pass || pr.boundary_empty || std::abs(pr.codimension - 1.0) > kDimensionTolerance)
      record(rep, "legendre-2: " + pr.message);
  }
  {
    const CrystalFamily f = shipped_family("triangular-2param");
    const PurityReport pr = purity_report(f, prank_key(2), max_m);
    ++rep.cases;
    note(f.name(), pr);
    const double expected = f.params() - 1;
    if (!pr.pass || !pr.boundary_dim || std::abs(pr.boundary_dim->value - expected) > kDimensionTolerance)
      record(rep, f.name() + ": non-generic p-rank locus " + pr.message);
    const PurityReport mid = purity_report(f, prank_key(1), max_m);
    ++rep.cases;
    note(f.name(), mid);
    if (!mid.pass) record(rep, f.name() + " prank:1: " + mid.message);
  }
  for (const auto& f : shipped_families()) {
    if (f.name() == "legendre-2" || f.params() != 1) continue;
    const int m = std::min(default_max_m(f), max_m);
    SweepOptions opts;
    opts.max_m = m;
    const StrataReport sr = sweep(f, opts);
    for (const auto& st : sr.strata) {
      if (st.key.rfind("newton:", 0) != 0) continue;
      const PurityReport pr = purity_report(sr, st.key);
      ++rep.cases;
      note(f.name(), pr);
      if (!pr.pass) record(rep, f.name() + " " + st.key + ": " + pr.message);
    }
  }
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport def1b_oracle() {
  Timer timer;
  OracleReport rep;
  rep.name = "def1b";
  for (const auto& f : shipped_families()) {
    const CheckReport c = as_prank_equivalence(f, default_max_m(f));
    ++rep.cases;
    rep.notes.push_back(f.name() + ": " + c.message);
    if (!c.pass) record(rep, f.name() + ": " + (c.details.empty() ? c.message : c.details.front()));
  }
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport witt_crosscheck_oracle(int trials, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "witt";
  for (u64 p : {2, 3})
    for (int s = 1; s <= 5; ++s) {
      const BackendReport br = crosscheck_backends(p, s, static_cast<std::size_t>(trials), seed * 31 + p * 7 + s);
      rep.cases += br.trials;
      for (const auto& m : br.mismatches) record(rep, "p=" + std::to_string(p) + " s=" + std::to_string(s) + ": " + m);
    }
  rep.seconds = timer.seconds();
  return rep;
}

OracleReport splitting_oracle(int trials, u64 seed) {
  Timer timer;
  OracleReport rep;
  rep.name = "splitting";
  std::mt19937_64 rng(seed * 49979687 + 3);
  int attempts = 0;
  while (static_cast<int>(rep.cases) < trials && attempts < 20 * trials) {
    ++attempts;
    const u64 p = rng() % 2 ? 3 : 2;
    const int deg = 1 + static_cast<int>(rng() % 2);
    const int n = 1 + static_cast<int>(rng() % 2);
    const int r = 2 + static_cast<int>(rng() % 3);
    const int k = 1 + static_cast<int>(rng() % r);
    const int b = static_cast<int>(rng() % 3);
    const int s = 20;
    const WittRing& R = witt_ring(make_field(p, deg), s);
    const int e = deg / std::gcd(n, deg);

    // p^b diag(U, N + pZ) with U invertible mod p and N strictly upper
    // triangular, disguised by a random change of basis.
    WittMatrix blocks(R, r, r);
    const WittMatrix u = random_unimodular(R, k, rng);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) blocks(i, j) = u(i, j);
    for (int i = k; i < r; ++i)
      for (int j = k; j < r; ++j) {
        WittElement z = random_element(R, rng).times_p_power(1);
        if (j > i) z = z + R.lift(R.reduce(random_element(R, rng)));
        blocks(i, j) = z;
      }
    const Valuation dv = determinant(blocks).valuation();
    if (!dv.finite() || e * (dv.value() + b * r) + 2 > s) continue;
    const WittMatrix a_blocks = blocks.scaled(R.p_power(b));
    const WittMatrix P = random_unimodular(R, r, rng);
    const WittMatrix A = inverse(P) * a_blocks * P.frobenius(static_cast<u64>(n));
    const Crystal c(n, A, false);
    const std::string tag = "b=" + std::to_string(b) + " n=" + std::to_string(n) + " " + show(A);
    ++rep.cases;

    SlopeSplitting sp;
    try {
      sp = slope_splitting(c, b);
    } catch (const Error& err) {
      record(rep, tag + ": " + err.what());
      continue;
    }
    const NewtonPolygon nu = newton_slopes(c);
    if (sp.slope_b.rank() != k) {
      record(rep, tag + ": slope-b summand has rank " + std::to_string(sp.slope_b.rank()) + ", expected " + std::to_string(k));
      continue;
    }
    const int kk = sp.slope_b.rank(), rest = r - kk;
    const WittMatrix E = sp.basis.block(0, 0, r, kk), K = sp.basis.block(0, kk, r, rest);
    if (!determinant(sp.basis).is_unit()) record(rep, tag + ": basis is not invertible");
    if (kk > 0 && !(A * E.frobenius(static_cast<u64>(n)) == E * sp.slope_b.matrix()))
      record(rep, tag + ": slope-b summand is not Frobenius-stable");
    if (rest > 0 && !(A * K.frobenius(static_cast<u64>(n)) == K * sp.higher.matrix()))
      record(rep, tag + ": complement is not Frobenius-stable");
    if (kk > 0) {
      const NewtonPolygon nb = newton_slopes(sp.slope_b);
      if (nb.slopes() != std::vector<Rational>(kk, Rational(b))) record(rep, tag + ": slope-b part has slopes " + nb.str());
      if (hodge_polygon(sp.slope_b).slopes != std::vector<int>(kk, b)) record(rep, tag + ": slope-b part has a non-constant Hodge polygon");
    }
    std::vector<Rational> combined;
    if (kk > 0) combined = newton_slopes(sp.slope_b).slopes();
    if (rest > 0) {
      const auto hs = newton_slopes(sp.higher).slopes();
      for (const auto& x : hs)
        if (x <= Rational(b)) record(rep, tag + ": complement has slope " + to_string(x));
      combined.insert(combined.end(), hs.begin(), hs.end());
    }
    std::sort(combined.begin(), combined.end());
    if (combined != nu.slopes()) record(rep, tag + ": summands give " + show(combined) + " instead of " + nu.str());
    if (kk > 0 && rest > 0 && newton_slopes(direct_sum(sp.slope_b, sp.higher)) != nu)
      record(rep, tag + ": direct sum changes the Newton polygon");
  }
  if (static_cast<int>(rep.cases) < trials) record(rep, "only " + std::to_string(rep.cases) + " usable samples");
  rep.seconds = timer.seconds();
  return rep;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma1", "fact1",  "prop2",  "prank",  "functor", "t-identity",
                                              "mazur",  "gk",     "purity", "def1b",  "witt",    "splitting"};
  return names;
}

OracleReport run_suite(const std::string& name, u64 seed) {
  if (name == "lemma1") return lemma1_oracle();
  if (name == "fact1" || name == "prop2" || name == "prank") {
    OracleReport rep;
    rep.name = name;
    for (u64 p : {2, 3}) {
      if (name == "fact1") merge(rep, fact1_oracle(p, 4, 3, 500, seed));
      if (name == "prop2") merge(rep, prop2_oracle(p, 2, 500, seed));
      if (name == "prank") merge(rep, prank_crosscheck(p, 100, seed));
    }
    return rep;
  }
  if (name == "functor") return functor_oracle(200, seed);
  if (name == "t-identity") return t_identity_oracle();
  if (name == "mazur") return mazur_oracle(500, seed);
  if (name == "gk") return gk_semicontinuity_oracle();
  if (name == "purity") return purity_oracle();
  if (name == "def1b") return def1b_oracle();
  if (name == "witt") return witt_crosscheck_oracle(1000, seed);
  if (name == "splitting") return splitting_oracle(100, seed);
  fail(ErrorKind::InvalidInput, "unknown suite '" + name + "'");
}

}  // namespace cstrata
