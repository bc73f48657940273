#include "cstrata/field_tower.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "cstrata/error.hpp"

namespace cstrata {

namespace {

using detail::Coeffs;
using detail::Modulus;
using detail::PolyQuotient;
using Poly = std::vector<u64>;  // low-to-high, over F_p

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo b (b nonzero, trimmed).
Poly poly_mod(Poly a, const Poly& b, const Modulus& m) {
  trim(a);
  const u64 inv_lead = m.pow(b.back(), m.value() - 2);
  while (a.size() >= b.size()) {
    const u64 c = m.mul(a.back(), inv_lead);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = m.sub(a[shift + i], m.mul(c, b[i]));
    trim(a);
  }
  return a;
}

Poly poly_gcd(Poly a, Poly b, const Modulus& m) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, m);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Coeffs qpow(const PolyQuotient& q, Coeffs base, u64 e) {
  Coeffs r{};
  r[0] = q.mod().reduce(1);
  while (e) {
    if (e & 1) q.mul(r, base, r);
    q.mul(base, base, base);
    e >>= 1;
  }
  return r;
}

u64 checked_pow(u64 p, int deg) {
  u64 r = 1;
  for (int i = 0; i < deg; ++i) {
    if (r > ~u64{0} / p) return 0;
    r *= p;
  }
  return r;
}

u64 splitmix(u64& state) {
  u64 z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::pair<u64, Poly>, FieldPtr>& field_registry() {
  static std::map<std::pair<u64, Poly>, FieldPtr> r;
  return r;
}

FieldPtr intern(u64 p, const Poly& poly) {
  std::lock_guard lock(registry_mutex());
  auto& reg = field_registry();
  auto key = std::make_pair(p, poly);
  auto it = reg.find(key);
  if (it != reg.end()) return it->second;
  auto f = std::make_shared<const FiniteField>(p, poly);
  reg.emplace(std::move(key), f);
  return f;
}

// Polynomials over a finite field, used for root finding in large targets.
using FPoly = std::vector<FFElem>;

void ftrim(FPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

FPoly fmod(FPoly a, const FPoly& b) {
  ftrim(a);
  const FFElem inv_lead = b.back().inverse();
  while (a.size() >= b.size()) {
    const FFElem c = a.back() * inv_lead;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    ftrim(a);
  }
  return a;
}

FPoly fdiv(FPoly a, const FPoly& b) {
  ftrim(a);
  const FFElem inv_lead = b.back().inverse();
  if (a.size() < b.size()) return {};
  FPoly q(a.size() - b.size() + 1, b.back().field().zero());
  while (a.size() >= b.size()) {
    const FFElem c = a.back() * inv_lead;
    const std::size_t shift = a.size() - b.size();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    ftrim(a);
  }
  return q;
}

FPoly fmulmod(const FPoly& a, const FPoly& b, const FPoly& g) {
  if (a.empty() || b.empty()) return {};
  FPoly r(a.size() + b.size() - 1, g.back().field().zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return fmod(std::move(r), g);
}

FPoly fgcd(FPoly a, FPoly b) {
  ftrim(a);
  ftrim(b);
  while (!b.empty()) {
    FPoly r = fmod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const FFElem inv = a.back().inverse();
    for (auto& c : a) c *= inv;
  }
  return a;
}

FPoly fpowmod(FPoly base, u64 e, const FPoly& g) {
  FPoly r{g.back().field().one()};
  base = fmod(std::move(base), g);
  while (e) {
    if (e & 1) r = fmulmod(r, base, g);
    base = fmulmod(base, base, g);
    e >>= 1;
  }
  return r;
}

// One root of the monic, squarefree, fully split polynomial g by equal-degree splitting.
FFElem find_root(FPoly g, u64 seed) {
  const FiniteField& F = g.back().field();
  u64 state = seed;
  const u64 Q = F.cardinality();
  if (F.p() != 2 && Q == 0) fail(ErrorKind::TooLarge, "target field too large for root finding");
  while (g.size() > 2) {
    Coeffs c{};
    for (int i = 0; i < F.deg(); ++i) c[i] = splitmix(state) % F.p();
    const FFElem a(&F, c);
    FPoly h;
    if (F.p() == 2) {
      FPoly y = fmod(FPoly{F.zero(), a}, g);
      FPoly t = y;
      for (int i = 1; i < F.deg(); ++i) {
        y = fmulmod(y, y, g);
        t.resize(std::max(t.size(), y.size()), F.zero());
        for (std::size_t k = 0; k < y.size(); ++k) t[k] += y[k];
      }
      h = fgcd(g, t);
    } else {
      FPoly t = fpowmod(FPoly{a, F.one()}, (Q - 1) / 2, g);
      if (t.empty()) t.push_back(F.zero());
      t[0] -= F.one();
      h = fgcd(g, t);
    }
    if (h.size() <= 1 || h.size() >= g.size()) continue;
    FPoly other = fgcd(fdiv(g, h), g);
    g = (h.size() <= other.size()) ? h : other;
  }
  return -(g[0] * g[1].inverse());
}

}  // namespace

// ---- FFElem ----

bool FFElem::is_zero() const { return detail::coeffs_zero(c_, field_->deg()); }

bool FFElem::is_one() const {
  if (c_[0] != 1) return false;
  for (int i = 1; i < field_->deg(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

u64 FFElem::index() const {
  u64 idx = 0;
  for (int i = field_->deg() - 1; i >= 0; --i) idx = idx * field_->p() + c_[i];
  return idx;
}

FFElem FFElem::operator+(const FFElem& o) const {
  FFElem r(field_, {});
  field_->arith().add(c_, o.c_, r.c_);
  return r;
}

FFElem FFElem::operator-(const FFElem& o) const {
  FFElem r(field_, {});
  field_->arith().sub(c_, o.c_, r.c_);
  return r;
}

FFElem FFElem::operator-() const {
  FFElem r(field_, {});
  field_->arith().neg(c_, r.c_);
  return r;
}

FFElem FFElem::operator*(const FFElem& o) const {
  FFElem r(field_, {});
  field_->arith().mul(c_, o.c_, r.c_);
  return r;
}

FFElem FFElem::scaled(u64 k) const {
  FFElem r(field_, {});
  field_->arith().scale(c_, field_->arith().mod().reduce(k), r.c_);
  return r;
}

FFElem FFElem::pow(u64 e) const { return FFElem(field_, qpow(field_->arith(), c_, e)); }

FFElem FFElem::inverse() const {
  if (is_zero()) fail(ErrorKind::PreconditionViolated, "inverse of zero");
  const int d = field_->deg();
  const Modulus& m = field_->arith().mod();
  if (d == 1) return FFElem(field_, Coeffs{m.pow(c_[0], m.value() - 2)});
  // Extended Euclid on (f, a) tracking the coefficient of a.
  Poly r0 = field_->defining_poly(), r1(c_.begin(), c_.begin() + d);
  trim(r1);
  Poly t0, t1{1};
  while (r1.size() > 1) {
    Poly q;
    Poly a = r0;
    const u64 inv_lead = m.pow(r1.back(), m.value() - 2);
    q.assign(a.size() >= r1.size() ? a.size() - r1.size() + 1 : 0, 0);
    while (a.size() >= r1.size()) {
      const u64 c = m.mul(a.back(), inv_lead);
      const std::size_t shift = a.size() - r1.size();
      q[shift] = c;
      for (std::size_t i = 0; i < r1.size(); ++i) a[shift + i] = m.sub(a[shift + i], m.mul(c, r1[i]));
      trim(a);
    }
    Poly qt(q.size() + t1.size(), 0);
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < t1.size(); ++j) qt[i + j] = m.add(qt[i + j], m.mul(q[i], t1[j]));
    Poly t2(std::max(t0.size(), qt.size()), 0);
    for (std::size_t i = 0; i < t2.size(); ++i)
      t2[i] = m.sub(i < t0.size() ? t0[i] : 0, i < qt.size() ? qt[i] : 0);
    trim(t2);
    r0 = std::move(r1);
    r1 = std::move(a);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  const u64 inv = m.pow(r1[0], m.value() - 2);
  Coeffs out{};
  for (std::size_t i = 0; i < t1.size() && i < static_cast<std::size_t>(d); ++i) out[i] = m.mul(t1[i], inv);
  return FFElem(field_, out);
}

bool operator==(const FFElem& a, const FFElem& b) {
  return a.field_ == b.field_ && detail::coeffs_equal(a.c_, b.c_, a.field_->deg());
}

bool enumeration_less(const FFElem& a, const FFElem& b) {
  for (int i = a.field().deg() - 1; i >= 0; --i)
    if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
  return false;
}

// ---- FiniteField ----

FiniteField::FiniteField(u64 p, Poly defining_poly)
    : p_(p),
      deg_(static_cast<int>(defining_poly.size()) - 1),
      poly_(std::move(defining_poly)),
      card_(checked_pow(p, deg_)),
      arith_(Modulus(p), poly_) {
  frob_cols_.resize(deg_);
  Coeffs xp{};
  if (deg_ == 1) {
    xp[0] = 0;
  } else {
    Coeffs x{};
    x[1] = 1;
    xp = qpow(arith_, x, p_);
  }
  Coeffs acc{};
  acc[0] = 1;
  for (int i = 0; i < deg_; ++i) {
    frob_cols_[i] = acc;
    arith_.mul(acc, xp, acc);
  }
}

FFElem FiniteField::zero() const { return FFElem(this, {}); }

FFElem FiniteField::one() const {
  Coeffs c{};
  c[0] = 1;
  return FFElem(this, c);
}

FFElem FiniteField::generator() const {
  if (deg_ == 1) return FFElem(this, Coeffs{arith_.mod().neg(poly_[0])});
  Coeffs c{};
  c[1] = 1;
  return FFElem(this, c);
}

FFElem FiniteField::from_int(u64 v) const {
  Coeffs c{};
  c[0] = v % p_;
  return FFElem(this, c);
}

FFElem FiniteField::from_coeffs(const std::vector<u64>& c) const {
  if (static_cast<int>(c.size()) > deg_) fail(ErrorKind::DegreeMismatch, "too many coefficients for field");
  Coeffs out{};
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] % p_;
  return FFElem(this, out);
}

FFElem FiniteField::from_index(u64 index) const {
  Coeffs c{};
  for (int i = 0; i < deg_; ++i) {
    c[i] = index % p_;
    index /= p_;
  }
  return FFElem(this, c);
}

FFElem FiniteField::frobenius_once(const FFElem& x) const {
  if (deg_ == 1) return x;
  Coeffs out{};
  for (int i = 0; i < deg_; ++i) {
    const u64 ci = x.coeff(i);
    if (ci == 0) continue;
    for (int j = 0; j < deg_; ++j) out[j] = arith_.mod().add(out[j], arith_.mod().mul(ci, frob_cols_[i][j]));
  }
  return FFElem(this, out);
}

std::string FiniteField::describe() const {
  std::ostringstream os;
  os << "F_" << p_;
  if (deg_ > 1) os << "^" << deg_;
  os << " = F_" << p_ << "[X]/(";
  bool first = true;
  for (int i = deg_; i >= 0; --i) {
    if (poly_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || poly_[i] != 1) os << poly_[i];
    if (i > 0) os << "X";
    if (i > 1) os << "^" << i;
  }
  os << ")";
  return os.str();
}

// ---- free functions ----

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; static_cast<detail::u128>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool is_irreducible(u64 p, const std::vector<u64>& monic_poly) {
  Poly f = monic_poly;
  for (auto& c : f) c %= p;
  trim(f);
  const int deg = static_cast<int>(f.size()) - 1;
  if (deg < 1 || f.back() != 1) return false;
  if (deg == 1) return true;
  const Modulus m(p);
  const PolyQuotient q(m, f);
  Coeffs x{};
  x[1] = 1;
  Coeffs y = x;
  for (int i = 1; i <= deg; ++i) {
    y = qpow(q, y, p);
    Poly diff(y.begin(), y.begin() + deg);
    diff[1] = m.sub(diff[1], 1);
    trim(diff);
    if (i == deg) return diff.empty();
    if (diff.empty()) return false;
    if (poly_gcd(f, diff, m).size() != 1) return false;
  }
  return true;
}

FieldPtr make_field(u64 p, int deg, u64 seed) {
  if (!is_prime(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (deg < 1) fail(ErrorKind::InvalidInput, "field degree must be positive");
  if (deg > detail::kMaxDegree) fail(ErrorKind::TooLarge, "field degree above " + std::to_string(detail::kMaxDegree));
  if (p >= (u64{1} << 62)) fail(ErrorKind::TooLarge, "characteristic too large");

  static std::mutex cache_mutex;
  static std::map<std::tuple<u64, int, u64>, FieldPtr> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({p, deg, seed});
    if (it != cache.end()) return it->second;
  }

  Poly found;
  if (deg == 1) {
    found = {0, 1};
  } else {
    const u64 space = checked_pow(p, deg);
    u64 state = seed;
    Poly cand(deg + 1, 0);
    cand[deg] = 1;
    constexpr u64 kMaxAttempts = u64{1} << 22;
    const u64 start = (seed == 0 || space == 0) ? 0 : splitmix(state) % space;
    for (u64 attempt = 0; attempt < kMaxAttempts; ++attempt) {
      if (space != 0 && attempt >= space) break;
      if (space == 0 && seed != 0) {
        for (int i = 0; i < deg; ++i) cand[i] = splitmix(state) % p;
      } else {
        u64 idx = space == 0 ? attempt : (start + attempt) % space;
        for (int i = 0; i < deg; ++i) {
          cand[i] = idx % p;
          idx /= p;
        }
      }
      if (is_irreducible(p, cand)) {
        found = cand;
        break;
      }
    }
    if (found.empty()) fail(ErrorKind::SearchExhausted, "no irreducible polynomial found");
  }
  FieldPtr f = intern(p, found);
  std::lock_guard lock(cache_mutex);
  cache.emplace(std::make_tuple(p, deg, seed), f);
  return f;
}

FieldPtr field_from_poly(u64 p, const std::vector<u64>& defining_poly) {
  if (!is_prime(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  Poly f = defining_poly;
  for (auto& c : f) c %= p;
  trim(f);
  if (f.size() < 2 || f.back() != 1) fail(ErrorKind::InvalidInput, "defining polynomial must be monic of degree >= 1");
  if (static_cast<int>(f.size()) - 1 > detail::kMaxDegree) fail(ErrorKind::TooLarge, "field degree too large");
  if (!is_irreducible(p, f)) fail(ErrorKind::InvalidInput, "defining polynomial is reducible");
  return intern(p, f);
}

FieldPtr shared_field(const FiniteField& field) { return intern(field.p(), field.defining_poly()); }

FFElem frobenius(const FFElem& x, u64 k) {
  const FiniteField& F = x.field();
  k %= static_cast<u64>(F.deg());
  FFElem y = x;
  for (u64 i = 0; i < k; ++i) y = F.frobenius_once(y);
  return y;
}

Embedding make_embedding(const FieldPtr& source, const FieldPtr& target, u64 scan_cap) {
  if (source->p() != target->p() || target->deg() % source->deg() != 0)
    fail(ErrorKind::DegreeMismatch, "no embedding " + source->describe() + " -> " + target->describe());

  static std::mutex cache_mutex;
  static std::map<std::tuple<const FiniteField*, const FiniteField*, bool>, FFElem> cache;
  const bool scan = target->cardinality() != 0 && target->cardinality() <= scan_cap;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({source.get(), target.get(), scan});
    if (it != cache.end()) return Embedding{source, target, it->second};
  }

  const FiniteField& T = *target;
  auto is_root = [&](const FFElem& y) {
    Coeffs out{};
    T.arith().eval_poly(source->defining_poly(), y.coeffs(), out);
    return detail::coeffs_zero(out, T.deg());
  };

  FFElem image;
  if (source.get() == target.get()) {
    image = T.generator();
  } else if (source->deg() == 1) {
    image = T.from_int(source->generator().coeff(0));
  } else if (scan) {
    bool found = false;
    for (u64 i = 0; i < T.cardinality() && !found; ++i) {
      FFElem y = T.from_index(i);
      if (is_root(y)) {
        image = y;
        found = true;
      }
    }
    if (!found) fail(ErrorKind::DegreeMismatch, "defining polynomial has no root in target");
  } else {
    FPoly g;
    for (u64 c : source->defining_poly()) g.push_back(T.from_int(c));
    FFElem root = find_root(g, 0x5eed);
    image = root;
    FFElem y = root;
    for (int i = 1; i < source->deg(); ++i) {
      y = T.frobenius_once(y);
      if (enumeration_less(y, image)) image = y;
    }
  }
  std::lock_guard lock(cache_mutex);
  cache.emplace(std::make_tuple(source.get(), target.get(), scan), image);
  return Embedding{source, target, image};
}

FFElem embed(const Embedding& e, const FFElem& x) {
  if (x.field_ptr() != e.source.get()) fail(ErrorKind::RingMismatch, "element is not in the embedding source");
  const FiniteField& T = *e.target;
  if (e.source->deg() == 1) return T.from_int(x.coeff(0));
  Poly c(x.coeffs().begin(), x.coeffs().begin() + e.source->deg());
  Coeffs out{};
  T.arith().eval_poly(c, e.image_of_generator.coeffs(), out);
  return FFElem(&T, out);
}

std::vector<FFElem> enumerate(const FiniteField& field, u64 cap) {
  const u64 n = field.cardinality();
  if (n == 0 || n > cap)
    fail(ErrorKind::TooLarge, field.describe() + " exceeds the enumeration cap of " + std::to_string(cap));
  std::vector<FFElem> out;
  out.reserve(n);
  for (u64 i = 0; i < n; ++i) out.push_back(field.from_index(i));
  return out;
}

}  // namespace cstrata
