#include "cstrata/crystal.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cstrata/error.hpp"

namespace cstrata {

namespace {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Matrix of phi^q: A sigma^n(A) ... sigma^{(q-1)n}(A).
WittMatrix iterate_matrix(const WittMatrix& a, int n, int q) {
  WittMatrix acc = a;
  WittMatrix twist = a;
  for (int k = 1; k < q; ++k) {
    twist = twist.frobenius(static_cast<u64>(n));
    acc = acc * twist;
  }
  return acc;
}

int required_precision(std::int64_t e, std::int64_t d, u64 p) {
  const std::int64_t need = e * d + 1;
  if (need > max_precision(p))
    fail(ErrorKind::PrecisionTooLarge, "certifying this polygon needs precision " + std::to_string(need));
  return static_cast<int>(need);
}

// The crystal itself if its precision is at least `need`, else an exact re-lift.
Crystal with_headroom(const Crystal& c, int need) {
  if (c.s() >= need) return c;
  if (!c.exact_lift())
    fail(ErrorKind::PrecisionTooSmall,
         "precision " + std::to_string(c.s()) + " below the required " + std::to_string(need));
  return c.at_precision(need);
}

}  // namespace

int max_precision(u64 p) {
  int s = 0;
  u64 m = 1;
  while (m <= ((u64{1} << 62) - 1) / p) {
    m *= p;
    ++s;
  }
  return s;
}

Crystal::Crystal(int n, WittMatrix matrix, bool exact_lift) : n_(n), matrix_(std::move(matrix)), exact_(exact_lift) {
  if (n_ < 1) fail(ErrorKind::InvalidInput, "Frobenius twist n must be positive");
  if (matrix_.rows() != matrix_.cols()) fail(ErrorKind::RankMismatch, "crystal matrix must be square");
}

int Crystal::linearization_exponent() const {
  const int d = ring().deg();
  return d / std::gcd(n_, d);
}

Crystal Crystal::at_precision(int s) const {
  if (s == this->s()) return *this;
  const WittRing& target = ring().with_precision(s);
  WittMatrix m = matrix_.change_precision(target);
  // Truncation keeps exactness only if no residue was cut.
  bool exact = exact_;
  if (s < this->s()) exact = exact && m.change_precision(ring()) == matrix_;
  return Crystal(n_, std::move(m), exact);
}

std::string Crystal::describe() const {
  std::ostringstream os;
  os << "rank " << rank() << " sigma^" << n_ << "-crystal over " << ring().describe();
  return os.str();
}

NewtonPolygon HodgePolygon::as_polygon() const {
  return NewtonPolygon::from_integers(std::vector<std::int64_t>(slopes.begin(), slopes.end()));
}

int HomGroup::log_order() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

Crystal slope_line_crystal(std::int64_t b, const WittRing& ring, int n) {
  if (b < 0) fail(ErrorKind::InvalidInput, "slope must be nonnegative");
  if (b >= ring.s()) fail(ErrorKind::PrecisionTooSmall, "slope " + std::to_string(b) + " needs precision above it");
  WittMatrix m(ring, 1, 1);
  m(0, 0) = ring.p_power(static_cast<int>(b));
  return Crystal(n, m, true);
}

WittMatrix linearize(const Crystal& c) { return iterate_matrix(c.matrix(), c.n(), c.linearization_exponent()); }

int det_valuation(const Crystal& c) {
  if (c.rank() == 0) return 0;
  Crystal cur = c;
  while (true) {
    const SmithForm sf = smith_form(cur.matrix());
    bool resolved = true;
    int total = 0;
    for (const auto& v : sf.exponents) {
      if (v.is_infinite()) {
        resolved = false;
        break;
      }
      total += v.value();
    }
    if (resolved) return total;
    if (!cur.exact_lift())
      fail(ErrorKind::PrecisionTooSmall, "determinant vanishes modulo p^" + std::to_string(cur.s()));
    const int smax = max_precision(cur.p());
    if (cur.s() >= smax) fail(ErrorKind::NotIsogeny, "determinant vanishes at every usable precision");
    cur = cur.at_precision(std::min(smax, 2 * cur.s()));
  }
}

NewtonData newton_data(const Crystal& c) {
  NewtonData out;
  out.e = c.linearization_exponent();
  if (c.rank() == 0) {
    out.precision = c.s();
    return out;
  }
  out.det_valuation = det_valuation(c);
  const int need = required_precision(out.e, out.det_valuation, c.p());
  const Crystal cur = with_headroom(c, need);
  out.precision = cur.s();
  const auto cp = charpoly(linearize(cur));
  const int r = c.rank();
  for (const auto& x : cp) out.charpoly_valuations.push_back(x.valuation());

  // Points (k, v(c_{r-k})) with finite valuation; lower hull by monotone chain.
  std::vector<std::pair<std::int64_t, std::int64_t>> pts;
  for (int k = 0; k <= r; ++k) {
    const Valuation v = out.charpoly_valuations[r - k];
    if (v.finite()) pts.emplace_back(k, v.value());
  }
  if (pts.front().first != 0 || pts.back().first != r || pts.back().second != out.e * out.det_valuation)
    fail(ErrorKind::PrecisionTooSmall, "characteristic polynomial endpoints not resolved");
  std::vector<std::pair<std::int64_t, std::int64_t>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      const std::int64_t cross = (a.first - o.first) * (pt.second - o.second) - (a.second - o.second) * (pt.first - o.first);
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(pt);
  }
  std::vector<Rational> slopes;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const std::int64_t dx = hull[i].first - hull[i - 1].first;
    const Rational slope(hull[i].second - hull[i - 1].second, dx * out.e);
    for (std::int64_t k = 0; k < dx; ++k) slopes.push_back(slope);
  }
  out.polygon = NewtonPolygon::from_slopes(std::move(slopes));
  return out;
}

NewtonPolygon newton_slopes(const Crystal& c) { return newton_data(c).polygon; }

HodgePolygon hodge_polygon(const Crystal& c) {
  const SmithForm sf = smith_form(c.matrix());
  HodgePolygon h;
  for (const auto& v : sf.exponents) {
    if (v.is_infinite())
      fail(ErrorKind::PrecisionTooSmall, "elementary divisor not resolved modulo p^" + std::to_string(c.s()));
    h.slopes.push_back(v.value());
  }
  return h;
}

bool divisible_by(const Crystal& c, int b) {
  if (b <= 0) return true;
  return c.matrix().min_valuation() >= Valuation(b);
}

int p_rank_stable(const Crystal& c) {
  const int r = c.rank();
  if (r == 0) return 0;
  const FFMatrix a = reduce_mod_p(c.matrix());
  FFMatrix m = a;
  int prev = rank(m);
  for (int step = 0; step <= r + 1; ++step) {
    if (prev == 0) return 0;
    m = a * m.frobenius(static_cast<u64>(c.n()));
    const int next = rank(m);
    if (next == prev) return prev;
    prev = next;
  }
  return prev;
}

Crystal exterior_power_crystal(const Crystal& c, int a) {
  const int r = c.rank();
  if (a < 1 || a > r) fail(ErrorKind::BadIndex, "exterior power index outside 1.." + std::to_string(r));
  if (binomial(r, a) > kMaxCompoundRank)
    fail(ErrorKind::RankCapExceeded, "C(" + std::to_string(r) + "," + std::to_string(a) + ") exceeds the compound cap");
  if (a == 1) return c;
  const int d = det_valuation(c);
  const int need = required_precision(c.linearization_exponent(), d * binomial(r - 1, a - 1), c.p());
  const Crystal cur = with_headroom(c, need);
  return Crystal(c.n(), compound(cur.matrix(), a), false);
}

Crystal iterate_crystal(const Crystal& c, int q) {
  if (q < 1) fail(ErrorKind::InvalidInput, "iterate count must be positive");
  if (q == 1) return c;
  const int d = det_valuation(c);
  const int deg = c.ring().deg();
  const int e = deg / std::gcd(c.n() * q, deg);
  const int need = required_precision(e, static_cast<std::int64_t>(q) * d, c.p());
  const Crystal cur = with_headroom(c, need);
  return Crystal(c.n() * q, iterate_matrix(cur.matrix(), c.n(), q), false);
}

Crystal direct_sum(const Crystal& a, const Crystal& b) {
  if (&a.ring() != &b.ring() || a.n() != b.n())
    fail(ErrorKind::RingMismatch, "direct sum needs the same ring, precision and twist");
  const int ra = a.rank(), rb = b.rank();
  WittMatrix m(a.ring(), ra + rb, ra + rb);
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < ra; ++j) m(i, j) = a.matrix()(i, j);
  for (int i = 0; i < rb; ++i)
    for (int j = 0; j < rb; ++j) m(ra + i, ra + j) = b.matrix()(i, j);
  return Crystal(a.n(), m, a.exact_lift() && b.exact_lift());
}

SlopeSplitting slope_splitting(const Crystal& c, int b) {
  if (b < 0 || b >= c.s()) fail(ErrorKind::PrecisionTooSmall, "split slope must lie below the precision");
  if (!divisible_by(c, b)) fail(ErrorKind::NoSplit, "matrix is not divisible by p^" + std::to_string(b));
  const WittRing& R = c.ring();
  const int r = c.rank();
  const int s = c.s();
  const WittMatrix psi = c.matrix().divide_p_power(b);
  const int N = std::max(1, s * r);
  const WittMatrix mN = iterate_matrix(psi, c.n(), N);
  const SmithForm sf = smith_form(mN, true);
  int k = 0;
  for (const auto& v : sf.exponents) {
    if (v == Valuation(0)) {
      ++k;
    } else if (v.finite()) {
      fail(ErrorKind::PrecisionTooSmall, "stable image is not a direct summand at this precision");
    }
  }
  const u64 deg = static_cast<u64>(R.deg());
  const u64 shift = (deg - (static_cast<u64>(c.n()) * N) % deg) % deg;  // sigma^{-nN}
  WittMatrix basis(R, r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < k; ++j) basis(i, j) = sf.left_inverse(i, j);
    for (int j = k; j < r; ++j) basis(i, j) = R.frobenius(sf.right(i, j), shift);
  }
  if (!determinant(basis).is_unit())
    fail(ErrorKind::PrecisionTooSmall, "stable image and stable kernel do not span");
  const WittMatrix a2 = inverse(basis) * c.matrix() * basis.frobenius(static_cast<u64>(c.n()));
  if (!a2.block(0, k, k, r - k).is_zero() || !a2.block(k, 0, r - k, k).is_zero())
    fail(ErrorKind::PrecisionTooSmall, "summands are not Frobenius-stable at this precision");
  return SlopeSplitting{Crystal(c.n(), a2.block(0, 0, k, k), false), Crystal(c.n(), a2.block(k, k, r - k, r - k), false),
                        basis};
}

HomGroup hom_group(const Crystal& c, int b) {
  if (b < 0 || b >= c.s()) fail(ErrorKind::PrecisionTooSmall, "slope must lie below the precision");
  const WittRing& R = c.ring();
  const int r = c.rank(), deg = R.deg(), s = c.s();
  const WittRing& Z = witt_ring(make_field(R.p(), 1), s);
  const int dim = r * deg;
  WittMatrix L(Z, dim, dim);
  const WittElement pb = R.p_power(b);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < deg; ++k) {
      // Image of the basis vector X^k e_i.
      std::vector<u64> xk(deg, 0);
      xk[k] = 1;
      const WittElement sk = R.frobenius(R.from_coeffs(xk), static_cast<u64>(c.n()));
      for (int j = 0; j < r; ++j) {
        WittElement val = c.matrix()(j, i) * sk;
        if (i == j) val -= pb * R.from_coeffs(xk);
        for (int l = 0; l < deg; ++l) L(j * deg + l, i * deg + k) = Z.from_int(static_cast<std::int64_t>(val.coeff(l)));
      }
    }
  const SmithForm sf = smith_form(L);
  HomGroup h;
  for (const auto& v : sf.exponents) {
    const int e = v.is_infinite() ? s : std::min(v.value(), s);
    if (e > 0) h.exponents.push_back(e);
  }
  std::sort(h.exponents.begin(), h.exponents.end());
  return h;
}

}  // namespace cstrata
