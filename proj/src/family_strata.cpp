#include "cstrata/family_strata.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "cstrata/error.hpp"
#include "cstrata/linalg.hpp"

namespace cstrata {

namespace {

// Everything needed to evaluate fibers over one field K.
struct FiberContext {
  FieldPtr field;
  const WittRing* ring = nullptr;
  int d = 0;
  std::vector<std::vector<std::vector<std::pair<std::vector<int>, WittElement>>>> entries;
};

FiberContext make_context(const CrystalFamily& f, const FieldPtr& K, int d, bool newton) {
  const int dk = K->deg();
  const int e = dk / std::gcd(f.n(), dk);
  int s = f.s();
  if (f.exact_lift()) s = std::max(s, (newton ? e * d : d) + 1);
  if (s > max_precision(f.p()))
    fail(ErrorKind::PrecisionTooLarge, "fiber over " + K->describe() + " needs precision " + std::to_string(s));
  FiberContext ctx;
  ctx.field = K;
  ctx.d = d;
  ctx.ring = &witt_ring(K, s);
  const WittRing& rb = f.ring().with_precision(s);
  const WittEmbedding emb = make_witt_embedding(rb, *ctx.ring);
  ctx.entries.resize(f.rank());
  for (int i = 0; i < f.rank(); ++i) {
    ctx.entries[i].resize(f.rank());
    for (int j = 0; j < f.rank(); ++j)
      for (const auto& mono : f.entries()[i][j]) {
        const WittElement c = f.exact_lift() ? f.ring().change_precision(mono.coeff, rb) : mono.coeff;
        ctx.entries[i][j].emplace_back(mono.exponents, embed(emb, c));
      }
  }
  return ctx;
}

std::string describe_point(const std::vector<FFElem>& point) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < point.size(); ++i) os << (i ? "," : "") << point[i].index();
  os << ") in " << (point.empty() ? std::string("base") : point[0].field().describe());
  return os.str();
}

Crystal evaluate(const CrystalFamily& f, const FiberContext& ctx, const std::vector<FFElem>& point) {
  const WittRing& R = *ctx.ring;
  const int k = f.params();
  std::vector<std::vector<WittElement>> powers(k);
  for (int i = 0; i < k; ++i) powers[i].push_back(R.one());
  WittMatrix m(R, f.rank(), f.rank());
  for (int i = 0; i < f.rank(); ++i)
    for (int j = 0; j < f.rank(); ++j) {
      WittElement acc = R.zero();
      for (const auto& [exps, c] : ctx.entries[i][j]) {
        WittElement v = c;
        for (int t = 0; t < k; ++t) {
          auto& pw = powers[t];
          if (pw.size() == 1 && exps[t] > 0) pw.push_back(R.teichmuller(point[t]));
          while (static_cast<int>(pw.size()) <= exps[t]) pw.push_back(pw.back() * pw[1]);
          if (exps[t] > 0) v = v * pw[exps[t]];
        }
        acc = acc + v;
      }
      m(i, j) = acc;
    }
  const Valuation v = determinant(m).valuation();
  if (!v.finite() || v.value() != ctx.d)
    fail(ErrorKind::NotIsogenyAtPoint, "det valuation " + (v.finite() ? std::to_string(v.value()) : std::string(">= ") + std::to_string(R.s())) +
                                           " differs from " + std::to_string(ctx.d) + " at " + describe_point(point));
  return Crystal(f.n(), m, false);
}

FieldPtr point_field(const CrystalFamily& f, const std::vector<FFElem>& point) {
  if (static_cast<int>(point.size()) != f.params())
    fail(ErrorKind::InvalidInput, "point has " + std::to_string(point.size()) + " coordinates, expected " +
                                      std::to_string(f.params()));
  if (point.empty()) return f.base();
  for (const auto& x : point)
    if (x.field_ptr() != point[0].field_ptr()) fail(ErrorKind::DegreeMismatch, "point coordinates lie in different fields");
  return shared_field(point[0].field());
}

u64 checked_pow(u64 b, u64 e) {
  u64 v = 1;
  for (u64 i = 0; i < e; ++i) {
    if (b != 0 && v > ~u64{0} / b) fail(ErrorKind::BudgetExceeded, "point count overflows");
    v *= b;
  }
  return v;
}

std::map<std::string, std::vector<u64>> tally(const std::vector<PointData>& pts, int max_m,
                                              const std::function<std::vector<std::string>(const PointData&)>& keys) {
  std::map<std::string, std::vector<u64>> out;
  for (const auto& pd : pts)
    for (const auto& key : keys(pd)) {
      auto& v = out[key];
      v.resize(max_m, 0);
      ++v[pd.m - 1];
    }
  return out;
}

bool near_integer(double x) { return std::abs(x - std::round(x)) <= kDimensionTolerance; }

}  // namespace

CrystalFamily::CrystalFamily(std::string name, int n, const WittRing& ring, int params,
                             std::vector<std::vector<FamilyEntry>> entries, bool exact_lift,
                             std::optional<int> det_valuation)
    : name_(std::move(name)),
      n_(n),
      ring_(&ring),
      params_(params),
      entries_(std::move(entries)),
      exact_(exact_lift),
      declared_d_(det_valuation) {
  if (n_ < 1) fail(ErrorKind::InvalidInput, "Frobenius exponent must be positive");
  if (params_ < 0) fail(ErrorKind::InvalidInput, "negative number of parameters");
  for (const auto& row : entries_) {
    if (row.size() != entries_.size()) fail(ErrorKind::InvalidInput, "family matrix is not square");
    for (const auto& entry : row)
      for (const auto& mono : entry) {
        if (static_cast<int>(mono.exponents.size()) != params_)
          fail(ErrorKind::InvalidInput, "monomial arity does not match the number of parameters");
        for (int e : mono.exponents)
          if (e < 0) fail(ErrorKind::InvalidInput, "negative exponent");
        if (&mono.coeff.ring() != ring_) fail(ErrorKind::RingMismatch, "coefficient outside the family's ring");
      }
  }
  if (declared_d_ && *declared_d_ < 0) fail(ErrorKind::InvalidInput, "negative det valuation");
}

std::vector<std::vector<BasePoly>> CrystalFamily::mod_p() const {
  std::vector<std::vector<BasePoly>> out(rank(), std::vector<BasePoly>(rank()));
  for (int i = 0; i < rank(); ++i)
    for (int j = 0; j < rank(); ++j) {
      std::vector<BasePoly::Term> terms;
      for (const auto& mono : entries_[i][j]) {
        const FFElem c = ring_->reduce(mono.coeff);
        if (!c.is_zero()) terms.push_back({mono.exponents, c});
      }
      out[i][j] = BasePoly(params_, std::move(terms));
    }
  return out;
}

std::string CrystalFamily::describe() const {
  std::ostringstream os;
  os << name_ << ": rank " << rank() << " F^" << n_ << "-crystal family over " << ring_->describe() << " in "
     << params_ << " parameter" << (params_ == 1 ? "" : "s");
  return os.str();
}

int family_det_valuation(const CrystalFamily& f) {
  if (f.declared_det_valuation()) return *f.declared_det_valuation();
  // At the origin only the constant monomials survive, so the fiber is exact
  // whenever the family is.
  const WittRing& R = f.ring();
  WittMatrix m(R, f.rank(), f.rank());
  for (int i = 0; i < f.rank(); ++i)
    for (int j = 0; j < f.rank(); ++j) {
      WittElement acc = R.zero();
      for (const auto& mono : f.entries()[i][j])
        if (std::all_of(mono.exponents.begin(), mono.exponents.end(), [](int e) { return e == 0; }))
          acc = acc + mono.coeff;
      m(i, j) = acc;
    }
  try {
    return det_valuation(Crystal(f.n(), m, f.exact_lift()));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotIsogeny || e.kind() == ErrorKind::PrecisionTooSmall)
      fail(ErrorKind::NotIsogenyAtPoint, "family is not an isogeny at the origin: " + std::string(e.what()));
    throw;
  }
}

Crystal fiber(const CrystalFamily& f, const std::vector<FFElem>& point) {
  const FieldPtr K = point_field(f, point);
  const FiberContext ctx = make_context(f, K, family_det_valuation(f), true);
  return evaluate(f, ctx, point);
}

ASSystem family_E1_system(const CrystalFamily& f) {
  return as_system_from_matrix(f.base(), f.params(), f.mod_p(), f.n());
}

std::vector<std::vector<FFElem>> affine_points(const CrystalFamily& f, int m) {
  const FieldPtr K = make_field(f.p(), f.base()->deg() * m);
  const auto elems = enumerate(*K);
  const int k = f.params();
  const u64 total = checked_pow(elems.size(), static_cast<u64>(k));
  std::vector<std::vector<FFElem>> out;
  out.reserve(total);
  for (u64 idx = 0; idx < total; ++idx) {
    std::vector<FFElem> pt(k);
    u64 rest = idx;
    for (int i = 0; i < k; ++i) {
      pt[i] = elems[rest % elems.size()];
      rest /= elems.size();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

const Stratum* StrataReport::find(const std::string& key) const {
  for (const auto& s : strata)
    if (s.key == key) return &s;
  return nullptr;
}

std::string newton_key(const NewtonPolygon& nu) { return "newton:" + nu.str(); }
std::string prank_key(int m) { return "prank:" + std::to_string(m); }
std::string break_key(const BreakPoint& bp) { return "break:" + std::to_string(bp.a) + "," + std::to_string(bp.b); }
std::string as_key(int log_p) { return "as:" + std::to_string(log_p); }

StrataReport sweep(const CrystalFamily& f, const SweepOptions& opts) {
  if (opts.max_m < 1) fail(ErrorKind::InvalidInput, "max_m must be positive");
  if (!opts.breaks.empty() && !opts.newton) fail(ErrorKind::InvalidInput, "break-point strata need Newton polygons");
  const u64 q = f.base()->cardinality();
  u64 total = 0;
  for (int m = 1; m <= opts.max_m; ++m) {
    total += checked_pow(checked_pow(q, static_cast<u64>(m)), static_cast<u64>(f.params()));
    if (total > opts.budget)
      fail(ErrorKind::BudgetExceeded, "sweep up to m = " + std::to_string(opts.max_m) + " exceeds the budget of " +
                                          std::to_string(opts.budget) + " points");
  }
  const int d = family_det_valuation(f);
  std::optional<ASSystem> e1;
  if (opts.as_counts) e1 = family_E1_system(f);

  StrataReport report;
  report.family = f.name();
  report.q = q;
  report.params = f.params();
  report.max_m = opts.max_m;
  for (int m = 1; m <= opts.max_m; ++m) {
    const auto pts = affine_points(f, m);
    const FieldPtr K = make_field(f.p(), f.base()->deg() * m);
    const FiberContext ctx = make_context(f, K, d, opts.newton);
    std::vector<PointData> data(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      PointData& pd = data[i];
      pd.m = m;
      for (const auto& x : pts[i]) pd.coords.push_back(x.index());
      const Crystal c = evaluate(f, ctx, pts[i]);
      if (opts.newton) {
        pd.newton = newton_slopes(c);
        for (const auto& bp : opts.breaks) pd.breaks.push_back(has_break(*pd.newton, bp));
      }
      if (opts.prank) pd.prank = p_rank_stable(c);
      if (e1) pd.as_log = geometric_count(*e1, pts[i]).log_p;
    });
    for (auto& pd : data) report.points.push_back(std::move(pd));
  }

  auto counts = tally(report.points, opts.max_m, [&](const PointData& pd) {
    std::vector<std::string> keys;
    if (pd.newton) keys.push_back(newton_key(*pd.newton));
    if (pd.prank >= 0) keys.push_back(prank_key(pd.prank));
    if (pd.as_log >= 0) keys.push_back(as_key(pd.as_log));
    for (std::size_t b = 0; b < pd.breaks.size(); ++b)
      if (pd.breaks[b]) keys.push_back(break_key(opts.breaks[b]));
    return keys;
  });
  for (const auto& bp : opts.breaks) counts[break_key(bp)].resize(opts.max_m, 0);
  for (auto& [key, v] : counts) report.strata.push_back({key, std::move(v)});
  return report;
}

DimensionEstimate estimate_dimension(u64 q, const std::vector<u64>& counts) {
  std::vector<int> nonzero;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) nonzero.push_back(static_cast<int>(i) + 1);
  if (nonzero.size() < 2) fail(ErrorKind::InsufficientData, "stratum is nonempty at fewer than two extension degrees");
  DimensionEstimate est;
  est.m2 = nonzero.back();
  est.m1 = nonzero[nonzero.size() - 2];
  const double ratio = static_cast<double>(counts[est.m2 - 1]) / static_cast<double>(counts[est.m1 - 1]);
  est.value = std::log(ratio) / std::log(static_cast<double>(q)) / (est.m2 - est.m1);
  est.confident = near_integer(est.value);
  return est;
}

DimensionEstimate estimate_dimension(const StrataReport& report, const std::string& key) {
  const Stratum* s = report.find(key);
  if (!s) fail(ErrorKind::InsufficientData, "stratum " + key + " is empty");
  return estimate_dimension(report.q, s->counts);
}

PurityReport purity_report(const StrataReport& sr, const std::string& target) {
  std::function<bool(const PointData&)> in_target, in_closure;
  if (target.rfind("prank:", 0) == 0) {
    const int m = std::stoi(target.substr(6));
    in_target = [m](const PointData& pd) { return pd.prank == m; };
    in_closure = [m](const PointData& pd) { return pd.prank >= 0 && pd.prank <= m; };
  } else if (target.rfind("newton:", 0) == 0) {
    const NewtonPolygon nu = parse_polygon(target.substr(7));
    in_target = [nu](const PointData& pd) { return pd.newton && *pd.newton == nu; };
    in_closure = [nu](const PointData& pd) {
      return pd.newton && pd.newton->rank() == nu.rank() && lies_above(*pd.newton, nu);
    };
  } else {
    fail(ErrorKind::InvalidInput, "purity target must be a prank: or newton: key, got '" + target + "'");
  }
  PurityReport rep;
  rep.target = target;
  std::vector<u64> tcounts(sr.max_m, 0);
  rep.closure_counts.assign(sr.max_m, 0);
  rep.boundary_counts.assign(sr.max_m, 0);
  for (const auto& pd : sr.points) {
    const bool t = in_target(pd);
    if (t) ++tcounts[pd.m - 1];
    if (in_closure(pd) || t) {
      ++rep.closure_counts[pd.m - 1];
      if (!t) ++rep.boundary_counts[pd.m - 1];
    }
  }
  if (std::all_of(tcounts.begin(), tcounts.end(), [](u64 c) { return c == 0; }))
    fail(ErrorKind::InsufficientData, "target stratum " + target + " has no sampled points");
  try {
    rep.target_dim = estimate_dimension(sr.q, tcounts);
  } catch (const Error&) {
  }
  rep.boundary_empty = std::all_of(rep.boundary_counts.begin(), rep.boundary_counts.end(), [](u64 c) { return c == 0; });
  if (rep.boundary_empty) {
    rep.pass = true;
    rep.message = "boundary empty: the stratum is closed in the sample";
    return rep;
  }
  rep.closure_dim = estimate_dimension(sr.q, rep.closure_counts);
  rep.boundary_dim = estimate_dimension(sr.q, rep.boundary_counts);
  rep.codimension = rep.closure_dim->value - rep.boundary_dim->value;
  rep.pass = rep.closure_dim->confident && rep.boundary_dim->confident &&
             std::abs(rep.codimension - 1.0) <= kDimensionTolerance;
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << "boundary codimension " << rep.codimension << " (closure " << rep.closure_dim->value
     << ", boundary " << rep.boundary_dim->value << ")";
  rep.message = os.str();
  return rep;
}

PurityReport purity_report(const CrystalFamily& f, const std::string& target, int max_m) {
  SweepOptions opts;
  opts.max_m = max_m;
  opts.newton = target.rfind("newton:", 0) == 0;
  opts.prank = !opts.newton;
  return purity_report(sweep(f, opts), target);
}

CheckReport semicontinuity_check(const CrystalFamily& f, int max_m) {
  CheckReport rep;
  SweepOptions opts;
  opts.max_m = max_m;
  opts.prank = false;
  StrataReport sr;
  try {
    sr = sweep(f, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotIsogenyAtPoint) throw;
    rep.pass = false;
    rep.message = std::string("det valuation not constant: ") + e.what();
    return rep;
  }
  std::set<NewtonPolygon> seen;
  for (const auto& pd : sr.points) seen.insert(*pd.newton);
  std::optional<NewtonPolygon> generic;
  for (const auto& cand : seen)
    if (std::all_of(seen.begin(), seen.end(), [&](const NewtonPolygon& x) { return lies_above(x, cand); })) {
      generic = cand;
      break;
    }
  if (!generic) {
    rep.pass = false;
    rep.message = "no sampled polygon lies below all others";
    return rep;
  }
  rep.details.push_back("generic polygon " + generic->str());
  std::vector<u64> exceptions(max_m, 0), totals(max_m, 0);
  for (const auto& pd : sr.points) {
    ++totals[pd.m - 1];
    if (*pd.newton != *generic) ++exceptions[pd.m - 1];
  }
  std::ostringstream os;
  for (int m = 1; m <= max_m; ++m) os << (m > 1 ? " " : "") << exceptions[m - 1] << "/" << totals[m - 1];
  rep.details.push_back("exceptional points per degree " + os.str());
  if (f.params() == 1) {
    const int nonzero = static_cast<int>(std::count_if(exceptions.begin(), exceptions.end(), [](u64 c) { return c > 0; }));
    if (exceptions.back() * 2 >= totals.back()) {
      rep.pass = false;
      rep.message = "generic polygon is not attained on a dense set";
      return rep;
    }
    if (nonzero >= 2) {
      const DimensionEstimate est = estimate_dimension(sr.q, exceptions);
      if (!est.confident || std::lround(est.value) != 0) {
        rep.pass = false;
        rep.message = "exceptional set does not look finite (dimension estimate " + std::to_string(est.value) + ")";
        return rep;
      }
    }
  }
  rep.message = "every fiber lies above " + generic->str() + "; det valuation constant";
  return rep;
}

CheckReport strata_intersection_Snu(const CrystalFamily& f, const NewtonPolygon& nu, int max_m) {
  SweepOptions opts;
  opts.max_m = max_m;
  opts.prank = false;
  const StrataReport sr = sweep(f, opts);
  const auto bps = break_points(nu);
  CheckReport rep;
  u64 members = 0;
  for (const auto& pd : sr.points) {
    const NewtonPolygon& x = *pd.newton;
    const bool lhs = x == nu;
    bool rhs = x.rank() == nu.rank() && lies_above(x, nu);
    for (const auto& bp : bps) rhs = rhs && has_break(x, bp);
    if (lhs) ++members;
    if (lhs != rhs) {
      rep.pass = false;
      rep.details.push_back("mismatch at degree " + std::to_string(pd.m) + " polygon " + x.str());
    }
  }
  rep.message = std::to_string(members) + " sampled points in S_" + nu.str() +
                (rep.pass ? ", identity holds at every point" : ", identity FAILS");
  return rep;
}

CheckReport partition_check(const StrataReport& sr, const std::vector<BreakPoint>& breaks) {
  CheckReport rep;
  std::set<NewtonPolygon> polygons;
  for (const auto& pd : sr.points) {
    if (!pd.newton || pd.prank < 0) {
      rep.pass = false;
      rep.message = "sweep lacks Newton or p-rank data";
      return rep;
    }
    polygons.insert(*pd.newton);
  }
  for (int m = 1; m <= sr.max_m; ++m) {
    u64 expected = 1;
    for (int i = 0; i < sr.params; ++i) expected *= checked_pow(sr.q, static_cast<u64>(m));
    u64 by_newton = 0, by_prank = 0;
    for (const auto& s : sr.strata) {
      if (s.key.rfind("newton:", 0) == 0) by_newton += s.counts[m - 1];
      if (s.key.rfind("prank:", 0) == 0) by_prank += s.counts[m - 1];
    }
    if (by_newton != expected || by_prank != expected) {
      rep.pass = false;
      rep.details.push_back("degree " + std::to_string(m) + ": strata do not partition the points");
    }
    for (const auto& bp : breaks) {
      const Stratum* t = sr.find(break_key(bp));
      u64 union_count = 0;
      for (const auto& nu : polygons)
        if (has_break(nu, bp))
          if (const Stratum* s = sr.find(newton_key(nu))) union_count += s->counts[m - 1];
      if (!t || t->counts[m - 1] != union_count) {
        rep.pass = false;
        rep.details.push_back("degree " + std::to_string(m) + ": " + break_key(bp) + " is not the union of its S_nu");
      }
    }
  }
  rep.message = rep.pass ? "strata partition every sampled degree" : "partition identity FAILS";
  return rep;
}

CheckReport as_prank_equivalence(const CrystalFamily& f, int max_m) {
  SweepOptions opts;
  opts.max_m = max_m;
  opts.newton = false;
  opts.as_counts = true;
  const StrataReport sr = sweep(f, opts);
  CheckReport rep;
  int generic = 0, mu1 = 0;
  for (const auto& pd : sr.points) {
    generic = std::max(generic, pd.prank);
    mu1 = std::max(mu1, pd.as_log);
    if (pd.as_log != f.n() * pd.prank) {
      rep.pass = false;
      rep.details.push_back("degree " + std::to_string(pd.m) + ": fiber count p^" + std::to_string(pd.as_log) +
                            " but p-rank " + std::to_string(pd.prank));
    }
  }
  if (mu1 != f.n() * generic) {
    rep.pass = false;
    rep.details.push_back("largest fiber exponent " + std::to_string(mu1) + " is not n times the generic p-rank");
  }
  std::set<int, std::greater<>> mus;
  for (const auto& pd : sr.points) mus.insert(pd.as_log);
  std::ostringstream os;
  os << "fiber exponents";
  for (int mu : mus) os << " " << mu;
  os << "; generic p-rank " << generic << ", n = " << f.n();
  rep.message = os.str();
  return rep;
}

namespace {

FamilyEntry constant_entry(const WittRing& R, int params, std::int64_t v) {
  if (v == 0) return {};
  return {FamilyMonomial{std::vector<int>(params, 0), R.from_int(v)}};
}

FamilyEntry variable_entry(const WittRing& R, int params, int which) {
  std::vector<int> e(params, 0);
  e[which] = 1;
  return {FamilyMonomial{e, R.one()}};
}

CrystalFamily legendre(const std::string& name, u64 p, int deg, int n) {
  const WittRing& R = witt_ring(make_field(p, deg), 2);
  const auto pp = static_cast<std::int64_t>(p);
  return CrystalFamily(name, n, R, 1,
                       {{variable_entry(R, 1, 0), constant_entry(R, 1, 1)},
                        {constant_entry(R, 1, pp), constant_entry(R, 1, 0)}},
                       true, 1);
}

CrystalFamily constant_family(const std::string& name, const std::vector<std::vector<std::int64_t>>& rows, int d) {
  const WittRing& R = witt_ring(make_field(2, 1), 2);
  std::vector<std::vector<FamilyEntry>> entries;
  for (const auto& row : rows) {
    entries.emplace_back();
    for (auto v : row) entries.back().push_back(constant_entry(R, 1, v));
  }
  return CrystalFamily(name, 1, R, 1, std::move(entries), true, d);
}

}  // namespace

std::vector<CrystalFamily> shipped_families() {
  std::vector<CrystalFamily> out;
  out.push_back(legendre("legendre-2", 2, 1, 1));
  out.push_back(legendre("legendre-3", 3, 1, 1));
  out.push_back(legendre("legendre-4-n2", 2, 2, 2));
  out.push_back(constant_family("ordinary-constant", {{1, 0}, {0, 2}}, 1));
  out.push_back(constant_family("supersingular-constant", {{0, 2}, {1, 0}}, 1));
  // [[t,1,0],[0,u,1],[p,0,0]]: det = p everywhere; p-rank 2 off the curve tu = 0.
  const WittRing& R = witt_ring(make_field(2, 1), 2);
  out.emplace_back("triangular-2param", 1, R, 2,
                   std::vector<std::vector<FamilyEntry>>{
                       {variable_entry(R, 2, 0), constant_entry(R, 2, 1), constant_entry(R, 2, 0)},
                       {constant_entry(R, 2, 0), variable_entry(R, 2, 1), constant_entry(R, 2, 1)},
                       {constant_entry(R, 2, 2), constant_entry(R, 2, 0), constant_entry(R, 2, 0)}},
                   true, 1);
  return out;
}

CrystalFamily shipped_family(const std::string& name) {
  for (auto& f : shipped_families())
    if (f.name() == name) return f;
  fail(ErrorKind::InvalidInput, "unknown family '" + name + "'");
}

int default_max_m(const CrystalFamily& f, u64 per_level_cap) {
  const u64 q = f.base()->cardinality();
  int best = 1;
  for (int m = 1; m <= 8; ++m) {
    long double size = std::pow(static_cast<long double>(q), static_cast<long double>(m) * f.params());
    if (size <= static_cast<long double>(per_level_cap)) best = m;
  }
  return best;
}

int worker_count() {
  if (const char* env = std::getenv("CRYSTAL_STRATA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace cstrata
