#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <unordered_map>

#include "cstrata/error.hpp"
#include "cstrata/witt_ring.hpp"

namespace cstrata {

namespace {

using detail::Modulus;
using detail::u128;

// Monomials in up to 12 variables packed as 10-bit exponent fields.
constexpr int kFieldBits = 10;
constexpr u64 kFieldMask = (u64{1} << kFieldBits) - 1;
constexpr int kMaxVars = 12;

struct KeyHash {
  std::size_t operator()(u128 k) const {
    u64 lo = static_cast<u64>(k), hi = static_cast<u64>(k >> 64);
    u64 h = lo * 0x9e3779b97f4a7c15ULL ^ (hi + 0x632be59bd9b4e019ULL + (lo << 6) + (lo >> 2));
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

using SparsePoly = std::unordered_map<u128, u64, KeyHash>;

int exponent_at(u128 key, int var) { return static_cast<int>((key >> (kFieldBits * var)) & kFieldMask); }

u128 var_key(int var, int e) { return static_cast<u128>(e) << (kFieldBits * var); }

class Recursion {
 public:
  Recursion(u64 p, int s, bool on_prime_field) : p_(p), s_(s), nvars_(2 * s), reduce_(on_prime_field), mod_(1) {
    u64 m = 1;
    for (int i = 0; i < s; ++i) m *= p;
    mod_ = Modulus(m);
  }

  u128 normalize(u128 key) const {
    if (!reduce_) return key;
    u128 out = 0;
    for (int v = 0; v < nvars_; ++v) {
      int e = exponent_at(key, v);
      if (e > 0) e = static_cast<int>((static_cast<u64>(e) - 1) % (p_ - 1) + 1);
      out |= var_key(v, e);
    }
    return out;
  }

  void add_into(SparsePoly& acc, const SparsePoly& b, u64 scale) const {
    for (const auto& [k, c] : b) {
      u64& slot = acc[k];
      slot = mod_.add(slot, mod_.mul(c, scale));
    }
  }

  SparsePoly mul(const SparsePoly& a, const SparsePoly& b) const {
    SparsePoly out;
    out.reserve(a.size() * 2);
    for (const auto& [ka, ca] : a)
      for (const auto& [kb, cb] : b) {
        u64& slot = out[normalize(ka + kb)];
        slot = mod_.add(slot, mod_.mul(ca, cb));
      }
    prune(out);
    return out;
  }

  SparsePoly power(const SparsePoly& a, u64 e) const {
    SparsePoly r{{0, mod_.reduce(1)}};
    SparsePoly b = a;
    while (e) {
      if (e & 1) r = mul(r, b);
      e >>= 1;
      if (e) b = mul(b, b);
    }
    return r;
  }

  void prune(SparsePoly& a) const {
    for (auto it = a.begin(); it != a.end();) it = (it->second == 0) ? a.erase(it) : std::next(it);
  }

  // w_k over the variable block starting at `offset`.
  SparsePoly ghost(int k, int offset) const {
    SparsePoly w;
    u64 pi = 1;
    for (int i = 0; i <= k; ++i) {
      u64 e = 1;
      for (int j = i; j < k; ++j) e *= p_;
      SparsePoly mono{{normalize(var_key(offset + i, static_cast<int>(e))), mod_.reduce(1)}};
      add_into(w, mono, mod_.reduce(pi));
      pi *= p_;
    }
    prune(w);
    return w;
  }

  // Solves p^k Z_k = rhs_k - sum_{i<k} p^i Z_i^{p^{k-i}} for k = 0..s-1.
  template <typename Rhs>
  std::vector<SparsePoly> solve(Rhs rhs) const {
    std::vector<SparsePoly> z;
    std::vector<SparsePoly> powers;  // powers[i] = Z_i^{p^{k-i}} for the current k
    for (int k = 0; k < s_; ++k) {
      for (auto& q : powers) q = power(q, p_);
      SparsePoly t = rhs(k);
      u64 pi = 1;
      for (int i = 0; i < k; ++i) {
        add_into(t, powers[i], mod_.neg(mod_.reduce(pi)));
        pi *= p_;
      }
      prune(t);
      SparsePoly zk;
      for (const auto& [key, c] : t) {
        if (c % pi != 0) fail(ErrorKind::PreconditionViolated, "ghost recursion lost divisibility");
        zk[key] = c / pi;
      }
      z.push_back(zk);
      powers.push_back(zk);
    }
    return z;
  }

  WittPolynomial to_table(const SparsePoly& a) const {
    std::vector<std::pair<std::vector<std::uint16_t>, u64>> rows;
    for (const auto& [k, c] : a) {
      const u64 cp = c % p_;
      if (cp == 0) continue;
      std::vector<std::uint16_t> ex(nvars_);
      for (int v = 0; v < nvars_; ++v) ex[v] = static_cast<std::uint16_t>(exponent_at(k, v));
      rows.emplace_back(std::move(ex), cp);
    }
    std::sort(rows.begin(), rows.end());
    WittPolynomial out;
    for (auto& [ex, c] : rows) out.terms.push_back({std::move(ex), c});
    return out;
  }

  WittTables run() const {
    WittTables t;
    t.p = p_;
    t.s = s_;
    auto sums = solve([&](int k) {
      SparsePoly w = ghost(k, 0);
      add_into(w, ghost(k, s_), 1);
      prune(w);
      return w;
    });
    auto prods = solve([&](int k) { return mul(ghost(k, 0), ghost(k, s_)); });
    for (const auto& a : sums) t.sum.push_back(to_table(a));
    for (const auto& a : prods) t.product.push_back(to_table(a));
    return t;
  }

 private:
  u64 p_;
  int s_;
  int nvars_;
  bool reduce_;
  Modulus mod_;
};

void check_generic_bounds(u64 p, int s) {
  if (!is_prime(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (s < 1) fail(ErrorKind::PrecisionTooSmall, "precision must be at least 1");
  if (s > kMaxGenericPrecision || 2 * s > kMaxVars)
    fail(ErrorKind::PrecisionTooLarge, "generic Witt tables limited to s <= " + std::to_string(kMaxGenericPrecision));
  u64 top = 1;
  for (int i = 1; i < s; ++i) {
    top *= p;
    if (top > kFieldMask) fail(ErrorKind::PrecisionTooLarge, "p^(s-1) exceeds the monomial exponent width");
  }
}

const WittTables& cached_tables(u64 p, int s, bool on_prime_field) {
  check_generic_bounds(p, s);
  static std::mutex mutex;
  static std::map<std::tuple<u64, int, bool>, std::unique_ptr<WittTables>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{p, s, on_prime_field}];
  if (!slot) slot = std::make_unique<WittTables>(Recursion(p, s, on_prime_field).run());
  return *slot;
}

u64 evaluate(const WittPolynomial& poly, const std::vector<std::vector<u64>>& powers, u64 p) {
  u64 acc = 0;
  for (const auto& term : poly.terms) {
    u64 v = term.coeff;
    for (std::size_t i = 0; i < term.exponents.size() && v != 0; ++i) {
      const auto e = term.exponents[i];
      if (e) v = v * powers[i][e] % p;
    }
    acc = (acc + v) % p;
  }
  return acc;
}

std::vector<u64> apply(const std::vector<WittPolynomial>& polys, u64 p, const std::vector<u64>& x,
                       const std::vector<u64>& y) {
  const int s = static_cast<int>(x.size());
  std::vector<std::vector<u64>> powers(2 * s, std::vector<u64>(p + 1, 1));
  for (int i = 0; i < 2 * s; ++i) {
    const u64 base = i < s ? x[i] : y[i - s];
    for (u64 e = 1; e <= p; ++e) powers[i][e] = powers[i][e - 1] * base % p;
  }
  std::vector<u64> out(s);
  for (int k = 0; k < s; ++k) out[k] = evaluate(polys[k], powers, p);
  return out;
}

}  // namespace

const WittTables& generic_witt_ops(u64 p, int s) { return cached_tables(p, s, false); }

const WittTables& generic_witt_ops_on_prime_field(u64 p, int s) { return cached_tables(p, s, true); }

GenericWittVector::GenericWittVector(u64 p, std::vector<u64> components) : p_(p), comp_(std::move(components)) {
  if (comp_.empty()) fail(ErrorKind::PrecisionTooSmall, "Witt vector needs at least one component");
  for (auto& c : comp_) c %= p_;
}

GenericWittVector GenericWittVector::operator+(const GenericWittVector& o) const {
  if (o.p_ != p_ || o.s() != s()) fail(ErrorKind::RingMismatch, "Witt vectors of different shape");
  const auto& t = generic_witt_ops_on_prime_field(p_, s());
  return GenericWittVector(p_, apply(t.sum, p_, comp_, o.comp_));
}

GenericWittVector GenericWittVector::operator*(const GenericWittVector& o) const {
  if (o.p_ != p_ || o.s() != s()) fail(ErrorKind::RingMismatch, "Witt vectors of different shape");
  const auto& t = generic_witt_ops_on_prime_field(p_, s());
  return GenericWittVector(p_, apply(t.product, p_, comp_, o.comp_));
}

u64 GenericWittVector::to_integer() const {
  const WittRing& R = witt_ring(make_field(p_, 1), s());
  const FiniteField& F = *R.field();
  WittElement acc = R.zero();
  for (int i = s() - 1; i >= 0; --i) acc = acc.scaled(static_cast<std::int64_t>(p_)) + R.teichmuller(F.from_int(comp_[i]));
  return acc.coeff(0);
}

GenericWittVector GenericWittVector::from_integer(u64 p, int s, u64 n) {
  std::vector<u64> comp(s);
  for (int i = 0; i < s; ++i) {
    const WittRing& R = witt_ring(make_field(p, 1), s - i);
    const u64 m = R.modulus();
    n %= m;
    comp[i] = n % p;
    const u64 t = R.teichmuller(R.field()->from_int(comp[i])).coeff(0);
    n = ((n + m - t) % m) / p;
  }
  return GenericWittVector(p, std::move(comp));
}

BackendReport crosscheck_backends(u64 p, int s, std::size_t trials, u64 seed, bool strict) {
  BackendReport report;
  report.p = p;
  report.s = s;
  const WittRing& R = witt_ring(make_field(p, 1), s);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<u64> dist(0, R.modulus() - 1);
  for (std::size_t t = 0; t < trials; ++t) {
    const u64 a = dist(rng), b = dist(rng);
    const auto wa = GenericWittVector::from_integer(p, s, a);
    const auto wb = GenericWittVector::from_integer(p, s, b);
    const u64 sum = (R.from_int(static_cast<std::int64_t>(a)) + R.from_int(static_cast<std::int64_t>(b))).coeff(0);
    const u64 prod = (R.from_int(static_cast<std::int64_t>(a)) * R.from_int(static_cast<std::int64_t>(b))).coeff(0);
    const u64 gsum = (wa + wb).to_integer();
    const u64 gprod = (wa * wb).to_integer();
    ++report.trials;
    if (gsum != sum || gprod != prod) {
      std::ostringstream os;
      os << "a=" << a << " b=" << b << " sum " << gsum << " vs " << sum << ", product " << gprod << " vs " << prod;
      if (strict) fail(ErrorKind::BackendMismatch, os.str());
      report.mismatches.push_back(os.str());
    }
  }
  return report;
}

}  // namespace cstrata
