#include "cstrata/witt_ring.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "cstrata/error.hpp"

namespace cstrata {

namespace {

using detail::Coeffs;
using detail::Modulus;
using detail::PolyQuotient;

u64 checked_prime_power(u64 p, int s) {
  if (s < 1) fail(ErrorKind::PrecisionTooSmall, "precision must be at least 1");
  u64 m = 1;
  for (int i = 0; i < s; ++i) {
    if (m > ((u64{1} << 62) - 1) / p) fail(ErrorKind::PrecisionTooLarge, "p^s must stay below 2^62");
    m *= p;
  }
  return m;
}

Coeffs one_coeffs(const PolyQuotient& q) {
  Coeffs c{};
  c[0] = q.mod().reduce(1);
  return c;
}

// Inverse of a unit of (Z/p^s)[X]/(f~) by Newton iteration from the residue inverse.
Coeffs unit_inverse(const PolyQuotient& q, const FiniteField& F, const Coeffs& u) {
  Coeffs residue{};
  for (int i = 0; i < F.deg(); ++i) residue[i] = u[i] % F.p();
  const FFElem ubar(&F, residue);
  if (ubar.is_zero()) fail(ErrorKind::PreconditionViolated, "inverse of a non-unit");
  Coeffs z = ubar.inverse().coeffs();
  const Coeffs one = one_coeffs(q);
  for (int iter = 0; iter < 80; ++iter) {
    Coeffs uz;
    q.mul(u, z, uz);
    if (detail::coeffs_equal(uz, one, q.degree())) return z;
    Coeffs two_minus;
    q.sub(one, uz, two_minus);
    two_minus[0] = q.mod().add(two_minus[0], q.mod().reduce(1));
    q.mul(z, two_minus, z);
  }
  fail(ErrorKind::PreconditionViolated, "unit inverse did not converge");
}

// Simple root of g (integer coefficients, low-to-high) in q, refined from y.
Coeffs newton_root(const PolyQuotient& q, const FiniteField& F, const std::vector<u64>& g, Coeffs y) {
  std::vector<u64> dg;
  for (std::size_t i = 1; i < g.size(); ++i) dg.push_back(q.mod().mul(q.mod().reduce(g[i]), q.mod().reduce(i)));
  for (int iter = 0; iter < 80; ++iter) {
    Coeffs val;
    q.eval_poly(g, y, val);
    if (detail::coeffs_zero(val, q.degree())) return y;
    Coeffs der;
    q.eval_poly(dg, y, der);
    Coeffs step;
    q.mul(val, unit_inverse(q, F, der), step);
    q.sub(y, step, y);
  }
  fail(ErrorKind::PreconditionViolated, "Hensel lifting did not converge");
}

int valuation_of(u64 c, u64 p) {
  int v = 0;
  while (c % p == 0) {
    c /= p;
    ++v;
  }
  return v;
}

}  // namespace

int Valuation::value() const {
  if (!finite()) fail(ErrorKind::PreconditionViolated, "valuation is infinite");
  return v_;
}

// ---- WittElement ----

bool WittElement::is_zero() const { return detail::coeffs_zero(c_, ring_->deg()); }

bool WittElement::is_one() const { return detail::coeffs_equal(c_, ring_->one().coeffs(), ring_->deg()); }

Valuation WittElement::valuation() const {
  int best = Valuation::kInfinite;
  const u64 p = ring_->p();
  for (int i = 0; i < ring_->deg(); ++i)
    if (c_[i] != 0) best = std::min(best, valuation_of(c_[i], p));
  return best == Valuation::kInfinite ? Valuation::infinite() : Valuation(best);
}

static void check_same(const WittElement& a, const WittElement& b) {
  if (a.ring_ptr() != b.ring_ptr()) fail(ErrorKind::RingMismatch, "operands live in different Witt rings");
}

WittElement WittElement::operator+(const WittElement& o) const {
  check_same(*this, o);
  WittElement r(ring_, {});
  ring_->arith().add(c_, o.c_, r.c_);
  return r;
}

WittElement WittElement::operator-(const WittElement& o) const {
  check_same(*this, o);
  WittElement r(ring_, {});
  ring_->arith().sub(c_, o.c_, r.c_);
  return r;
}

WittElement WittElement::operator-() const {
  WittElement r(ring_, {});
  ring_->arith().neg(c_, r.c_);
  return r;
}

WittElement WittElement::operator*(const WittElement& o) const {
  check_same(*this, o);
  WittElement r(ring_, {});
  ring_->arith().mul(c_, o.c_, r.c_);
  return r;
}

WittElement WittElement::scaled(std::int64_t k) const {
  WittElement r(ring_, {});
  ring_->arith().scale(c_, ring_->arith().mod().reduce_signed(k), r.c_);
  return r;
}

WittElement WittElement::pow(u64 e) const {
  Coeffs r = one_coeffs(ring_->arith());
  Coeffs b = c_;
  while (e) {
    if (e & 1) ring_->arith().mul(r, b, r);
    ring_->arith().mul(b, b, b);
    e >>= 1;
  }
  return WittElement(ring_, r);
}

WittElement WittElement::inverse() const {
  return WittElement(ring_, unit_inverse(ring_->arith(), *ring_->field(), c_));
}

WittElement WittElement::divide_p_power(int v) const {
  if (v < 0) fail(ErrorKind::PreconditionViolated, "negative exponent");
  if (v == 0) return *this;
  if (v >= ring_->s()) {
    if (!is_zero()) fail(ErrorKind::PreconditionViolated, "element not divisible by p^" + std::to_string(v));
    return ring_->zero();
  }
  const Valuation val = valuation();
  if (val < Valuation(v)) fail(ErrorKind::PreconditionViolated, "element not divisible by p^" + std::to_string(v));
  u64 pv = 1;
  for (int i = 0; i < v; ++i) pv *= ring_->p();
  WittElement r(ring_, {});
  for (int i = 0; i < ring_->deg(); ++i) r.c_[i] = c_[i] / pv;
  return r;
}

WittElement WittElement::times_p_power(int v) const { return *this * ring_->p_power(v); }

bool operator==(const WittElement& a, const WittElement& b) {
  return a.ring_ == b.ring_ && detail::coeffs_equal(a.c_, b.c_, a.ring_->deg());
}

// ---- WittRing ----

WittRing::WittRing(FieldPtr field, int s)
    : field_(std::move(field)), s_(s), arith_(Modulus(checked_prime_power(field_->p(), s)), field_->defining_poly()) {
  const int d = deg();
  Coeffs x{};
  if (d == 1) {
    x[0] = arith_.mod().reduce(arith_.mod().neg(field_->defining_poly()[0]));
    frob_image_ = WittElement(this, x);
  } else {
    // Root of f~ congruent to X^p mod p.
    const FFElem xp = field_->frobenius_once(field_->generator());
    frob_image_ = WittElement(this, newton_root(arith_, *field_, lifted_poly(), xp.coeffs()));
  }
  frob_cols_.assign(d, std::vector<Coeffs>(d));
  Coeffs gk{};
  if (d > 1) gk[1] = 1;
  else gk = x;
  for (int k = 0; k < d; ++k) {
    Coeffs acc = one_coeffs(arith_);
    for (int i = 0; i < d; ++i) {
      frob_cols_[k][i] = acc;
      arith_.mul(acc, gk, acc);
    }
    // sigma^{k+1}(X) = sigma^k applied to sigma(X).
    if (d > 1) {
      Coeffs next{};
      const Coeffs& src = frob_image_.coeffs();
      for (int i = 0; i < d; ++i) {
        if (src[i] == 0) continue;
        for (int j = 0; j < d; ++j)
          next[j] = arith_.mod().add(next[j], arith_.mod().mul(src[i], frob_cols_[k][i][j]));
      }
      gk = next;
    }
  }
}

WittElement WittRing::zero() const { return WittElement(this, {}); }

WittElement WittRing::one() const { return WittElement(this, one_coeffs(arith_)); }

WittElement WittRing::generator() const {
  if (deg() == 1) return from_int(static_cast<std::int64_t>(field_->generator().coeff(0)));
  Coeffs c{};
  c[1] = 1;
  return WittElement(this, c);
}

WittElement WittRing::from_int(std::int64_t v) const {
  Coeffs c{};
  c[0] = arith_.mod().reduce_signed(v);
  return WittElement(this, c);
}

WittElement WittRing::from_coeffs(const std::vector<u64>& c) const {
  if (static_cast<int>(c.size()) > deg()) fail(ErrorKind::DegreeMismatch, "too many coefficients for Witt ring");
  Coeffs out{};
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = arith_.mod().reduce(c[i]);
  return WittElement(this, out);
}

WittElement WittRing::p_power(int v) const {
  if (v >= s_) return zero();
  std::int64_t pv = 1;
  for (int i = 0; i < v; ++i) pv *= static_cast<std::int64_t>(p());
  return from_int(pv);
}

WittElement WittRing::frobenius(const WittElement& x, u64 k) const {
  const int d = deg();
  if (d == 1) return x;
  const auto& cols = frob_cols_[k % static_cast<u64>(d)];
  Coeffs out{};
  const Modulus& m = arith_.mod();
  for (int i = 0; i < d; ++i) {
    const u64 ci = x.coeff(i);
    if (ci == 0) continue;
    for (int j = 0; j < d; ++j) out[j] = m.add(out[j], m.mul(ci, cols[i][j]));
  }
  return WittElement(this, out);
}

FFElem WittRing::reduce(const WittElement& x) const {
  Coeffs c{};
  for (int i = 0; i < deg(); ++i) c[i] = x.coeff(i) % p();
  return FFElem(field_.get(), c);
}

WittElement WittRing::lift(const FFElem& x) const {
  if (x.field_ptr() != field_.get()) fail(ErrorKind::RingMismatch, "element is not in the residue field");
  return WittElement(this, x.coeffs());
}

WittElement WittRing::teichmuller(const FFElem& c) const {
  WittElement a = lift(c);
  if (s_ == 1 || c.is_zero()) return a;
  for (int round = 0; round + 1 < s_; ++round)
    for (int j = 0; j < deg(); ++j) a = a.pow(p());
  return a;
}

const WittRing& WittRing::with_precision(int s) const { return witt_ring(field_, s); }

WittElement WittRing::change_precision(const WittElement& x, const WittRing& target) const {
  if (target.field_.get() != field_.get()) fail(ErrorKind::RingMismatch, "precision change across fields");
  Coeffs c{};
  for (int i = 0; i < deg(); ++i) c[i] = target.arith_.mod().reduce(x.coeff(i));
  return WittElement(&target, c);
}

std::string WittRing::describe() const {
  std::ostringstream os;
  os << "W_" << s_ << "(" << field_->describe() << ")";
  return os.str();
}

const WittRing& witt_ring(const FieldPtr& field, int s) {
  static std::mutex mutex;
  static std::map<std::pair<const FiniteField*, int>, std::unique_ptr<WittRing>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{field.get(), s}];
  if (!slot) {
    try {
      slot = std::make_unique<WittRing>(field, s);
    } catch (...) {
      cache.erase({field.get(), s});
      throw;
    }
  }
  return *slot;
}

WittEmbedding make_witt_embedding(const WittRing& source, const WittRing& target) {
  if (source.s() != target.s()) fail(ErrorKind::RingMismatch, "Witt embedding requires equal precision");
  const Embedding fe = make_embedding(source.field(), target.field());
  WittEmbedding e{&source, &target, {}};
  if (source.deg() == 1) {
    e.image_of_generator = target.from_int(static_cast<std::int64_t>(source.generator().coeff(0)));
    return e;
  }
  e.image_of_generator = WittElement(
      &target, newton_root(target.arith(), *target.field(), source.lifted_poly(), fe.image_of_generator.coeffs()));
  return e;
}

WittElement embed(const WittEmbedding& e, const WittElement& x) {
  if (x.ring_ptr() != e.source) fail(ErrorKind::RingMismatch, "element is not in the embedding source");
  if (e.source->deg() == 1) return e.target->from_int(static_cast<std::int64_t>(x.coeff(0)));
  std::vector<u64> c(x.coeffs().begin(), x.coeffs().begin() + e.source->deg());
  Coeffs out{};
  e.target->arith().eval_poly(c, e.image_of_generator.coeffs(), out);
  return WittElement(e.target, out);
}

}  // namespace cstrata
