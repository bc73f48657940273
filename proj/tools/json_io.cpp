#include "json_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>

#include "cstrata/error.hpp"

namespace cstrata::cli {

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.is_object()) throw InputError(ptr, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(child(ptr, key), "missing required member '" + key + "'");
  return *it;
}

const json* optional_member(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw InputError(ptr, "expected an array");
  return j;
}

// Integers may be JSON numbers or decimal strings (for values above 2^53).
std::int64_t get_int(const json& j, const std::string& ptr, std::int64_t lo, std::int64_t hi) {
  std::int64_t v = 0;
  if (j.is_number_integer()) {
    if (j.is_number_unsigned() && j.get<u64>() > static_cast<u64>(std::numeric_limits<std::int64_t>::max()))
      throw InputError(ptr, "integer out of range");
    v = j.get<std::int64_t>();
  } else if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) throw InputError(ptr, "expected an integer, got \"" + s + "\"");
  } else {
    throw InputError(ptr, "expected an integer");
  }
  if (v < lo || v > hi)
    throw InputError(ptr, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

int get_small(const json& j, const std::string& ptr, int lo, int hi) { return static_cast<int>(get_int(j, ptr, lo, hi)); }

constexpr std::int64_t kI64Max = std::numeric_limits<std::int64_t>::max();

// A Witt element is either an array of deg residues in [0, p^s) or a single
// integer, read modulo p^s.
WittElement parse_witt(const json& j, const WittRing& R, const std::string& ptr) {
  if (!j.is_array()) {
    return R.from_int(get_int(j, ptr, std::numeric_limits<std::int64_t>::min() + 1, kI64Max));
  }
  if (static_cast<int>(j.size()) != R.deg())
    throw InputError(ptr, "expected " + std::to_string(R.deg()) + " residues, got " + std::to_string(j.size()));
  std::vector<u64> c;
  for (std::size_t i = 0; i < j.size(); ++i)
    c.push_back(static_cast<u64>(get_int(j[i], child(ptr, i), 0, static_cast<std::int64_t>(R.modulus() - 1))));
  return R.from_coeffs(c);
}

// A field element is either an array of deg residues mod p or its enumeration
// index.
FFElem parse_ffelem(const json& j, const FiniteField& F, const std::string& ptr) {
  if (!j.is_array()) {
    const u64 card = F.cardinality();
    return F.from_index(static_cast<u64>(get_int(j, ptr, 0, card == 0 ? kI64Max : static_cast<std::int64_t>(card - 1))));
  }
  if (static_cast<int>(j.size()) != F.deg())
    throw InputError(ptr, "expected " + std::to_string(F.deg()) + " residues, got " + std::to_string(j.size()));
  std::vector<u64> c;
  for (std::size_t i = 0; i < j.size(); ++i)
    c.push_back(static_cast<u64>(get_int(j[i], child(ptr, i), 0, static_cast<std::int64_t>(F.p() - 1))));
  return F.from_coeffs(c);
}

std::vector<int> parse_monomial(const json& j, int params, const std::string& ptr) {
  require_array(j, ptr);
  if (static_cast<int>(j.size()) != params)
    throw InputError(ptr, "expected " + std::to_string(params) + " exponents, got " + std::to_string(j.size()));
  std::vector<int> e;
  for (std::size_t i = 0; i < j.size(); ++i) e.push_back(get_small(j[i], child(ptr, i), 0, 1 << 20));
  return e;
}

BasePoly parse_base_poly(const json& j, const FieldPtr& F, int params, const std::string& ptr) {
  if (!j.is_object()) return BasePoly::constant(params, parse_ffelem(j, *F, ptr));
  const std::string tp = child(ptr, "terms");
  const json& terms = require_array(require(j, ptr, "terms"), tp);
  std::vector<BasePoly::Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = child(tp, i);
    out.push_back({parse_monomial(require(terms[i], p, "monomial"), params, child(p, "monomial")),
                   parse_ffelem(require(terms[i], p, "coeff"), *F, child(p, "coeff"))});
  }
  return BasePoly(params, std::move(out));
}

int parse_precision(const json& doc, u64 p) {
  return get_small(require(doc, "", "s"), "/s", 1, max_precision(p));
}

// Square array of arrays; entries handed to `entry`.
template <class Entry>
auto parse_square(const json& doc, Entry&& entry) {
  const json& m = require_array(require(doc, "", "matrix"), "/matrix");
  const std::size_t r = m.size();
  if (r == 0) throw InputError("/matrix", "matrix must have at least one row");
  using T = decltype(entry(m[0][0], std::string()));
  std::vector<std::vector<T>> out;
  for (std::size_t i = 0; i < r; ++i) {
    const std::string rp = child("/matrix", i);
    require_array(m[i], rp);
    if (m[i].size() != r)
      throw InputError("/matrix", "matrix is not square: row " + std::to_string(i) + " has " + std::to_string(m[i].size()) +
                                      " entries, expected " + std::to_string(r));
    out.emplace_back();
    for (std::size_t k = 0; k < r; ++k) out.back().push_back(entry(m[i][k], child(rp, k)));
  }
  return out;
}

// Library errors raised while building objects from valid-looking input are
// attributed to the member that produced them.
template <class F>
auto attributed(const std::string& ptr, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw InputError(ptr, e.what());
  }
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("", path + ": " + e.what());
  }
}

FieldPtr parse_field(const json& doc) {
  const u64 p = static_cast<u64>(get_int(require(doc, "", "p"), "/p", 2, std::int64_t{1} << 31));
  if (!is_prime(p)) throw InputError("/p", std::to_string(p) + " is not prime");
  const json* f = optional_member(doc, "field");
  if (!f) return make_field(p, 1);
  if (!f->is_object()) throw InputError("/field", "expected an object");
  if (const json* fp = optional_member(*f, "p"); fp && static_cast<u64>(get_int(*fp, "/field/p", 2, kI64Max)) != p)
    throw InputError("/field/p", "field characteristic differs from /p");
  const int deg = get_small(require(*f, "/field", "deg"), "/field/deg", 1, 64);
  if (const json* poly = optional_member(*f, "defining_poly")) {
    require_array(*poly, "/field/defining_poly");
    if (static_cast<int>(poly->size()) != deg + 1)
      throw InputError("/field/defining_poly", "expected " + std::to_string(deg + 1) + " coefficients (low to high, monic)");
    std::vector<u64> c;
    for (std::size_t i = 0; i < poly->size(); ++i)
      c.push_back(static_cast<u64>(get_int((*poly)[i], child("/field/defining_poly", i), 0, static_cast<std::int64_t>(p - 1))));
    if (c.back() != 1) throw InputError("/field/defining_poly", "polynomial must be monic");
    if (!is_irreducible(p, c)) throw InputError("/field/defining_poly", "polynomial is not irreducible");
    return attributed("/field/defining_poly", [&] { return field_from_poly(p, c); });
  }
  return attributed("/field", [&] { return make_field(p, deg); });
}

Crystal parse_crystal(const json& doc) {
  if (!doc.is_object()) throw InputError("", "expected an object");
  const FieldPtr F = parse_field(doc);
  const WittRing& R = witt_ring(F, parse_precision(doc, F->p()));
  const json* nj = optional_member(doc, "n");
  const int n = nj ? get_small(*nj, "/n", 1, 1 << 20) : 1;
  const json* ej = optional_member(doc, "exact");
  if (ej && !ej->is_boolean()) throw InputError("/exact", "expected a boolean");
  const auto rows = parse_square(doc, [&](const json& j, const std::string& ptr) { return parse_witt(j, R, ptr); });
  const int r = static_cast<int>(rows.size());
  WittMatrix m(R, r, r);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k) m(i, k) = rows[i][k];
  return attributed("/matrix", [&] { return Crystal(n, m, ej ? ej->get<bool>() : true); });
}

CrystalFamily parse_family(const json& doc) {
  if (!doc.is_object()) throw InputError("", "expected an object");
  const FieldPtr F = parse_field(doc);
  const WittRing& R = witt_ring(F, parse_precision(doc, F->p()));
  const json* nj = optional_member(doc, "n");
  const int n = nj ? get_small(*nj, "/n", 1, 1 << 20) : 1;
  const int params = get_small(require(doc, "", "params"), "/params", 0, 8);
  std::string name = "family";
  if (const json* nm = optional_member(doc, "name")) {
    if (!nm->is_string()) throw InputError("/name", "expected a string");
    name = nm->get<std::string>();
  }
  const json* ej = optional_member(doc, "exact");
  if (ej && !ej->is_boolean()) throw InputError("/exact", "expected a boolean");
  std::optional<int> d;
  if (const json* dj = optional_member(doc, "det_valuation")) d = get_small(*dj, "/det_valuation", 0, 1 << 20);
  auto entries = parse_square(doc, [&](const json& j, const std::string& ptr) {
    FamilyEntry e;
    if (!j.is_object()) {
      e.push_back({std::vector<int>(params, 0), parse_witt(j, R, ptr)});
      return e;
    }
    const std::string tp = child(ptr, "terms");
    const json& terms = require_array(require(j, ptr, "terms"), tp);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string p = child(tp, i);
      e.push_back({parse_monomial(require(terms[i], p, "monomial"), params, child(p, "monomial")),
                   parse_witt(require(terms[i], p, "coeff"), R, child(p, "coeff"))});
    }
    return e;
  });
  return attributed("/matrix", [&] { return CrystalFamily(name, n, R, params, std::move(entries), ej ? ej->get<bool>() : true, d); });
}

ASSystem parse_system(const json& doc) {
  if (!doc.is_object()) throw InputError("", "expected an object");
  ASSystem sys;
  sys.base = parse_field(doc);
  const json* pj = optional_member(doc, "params");
  sys.params = pj ? get_small(*pj, "/params", 0, 8) : 0;
  const json& eqs = require_array(require(doc, "", "equations"), "/equations");
  if (eqs.empty()) throw InputError("/equations", "at least one equation is required");
  const int r = static_cast<int>(eqs.size());
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string ep = child("/equations", i);
    if (!eqs[i].is_object()) throw InputError(ep, "expected an object");
    ASEquation eq;
    if (const json* terms = optional_member(eqs[i], "terms")) {
      const std::string tp = child(ep, "terms");
      require_array(*terms, tp);
      for (std::size_t k = 0; k < terms->size(); ++k) {
        const std::string p = child(tp, k);
        const json& t = (*terms)[k];
        ASTerm term;
        term.var = get_small(require(t, p, "var"), child(p, "var"), 0, r - 1);
        term.exp = get_small(require(t, p, "exp"), child(p, "exp"), 1, 62);
        term.coeff = parse_base_poly(require(t, p, "coeff"), sys.base, sys.params, child(p, "coeff"));
        eq.terms.push_back(std::move(term));
      }
    }
    const json* c = optional_member(eqs[i], "constant");
    eq.constant = c ? parse_base_poly(*c, sys.base, sys.params, child(ep, "constant"))
                    : BasePoly::constant(sys.params, sys.base->zero());
    sys.equations.push_back(std::move(eq));
  }
  attributed("/equations", [&] {
    validate(sys);
    return 0;
  });
  return sys;
}

std::vector<FFElem> parse_point(const std::string& text, int params, const FieldPtr& field) {
  std::vector<FFElem> point(params, field->zero());
  std::vector<bool> seen(params, false);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    pos = comma + 1;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw InputError("", "point coordinate '" + item + "' is not of the form t<i>=<index>");
    const std::string var = item.substr(0, eq);
    int idx = -1;
    if (var == "t" && params == 1) idx = 0;
    else if (var.size() > 1 && var[0] == 't') idx = std::atoi(var.c_str() + 1) - 1;
    if (idx < 0 || idx >= params) throw InputError("", "unknown parameter '" + var + "'");
    const std::string value = item.substr(eq + 1);
    u64 v = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size() || value.empty() ||
        (field->cardinality() != 0 && v >= field->cardinality()))
      throw InputError("", "coordinate '" + value + "' is not an element index of " + field->describe());
    point[idx] = field->from_index(v);
    seen[idx] = true;
  }
  for (int i = 0; i < params; ++i)
    if (!seen[i]) throw InputError("", "point is missing t" + std::to_string(i + 1));
  return point;
}

json field_json(const FiniteField& f) {
  json poly = json::array();
  for (u64 c : f.defining_poly()) poly.push_back(c);
  return json{{"p", f.p()}, {"deg", f.deg()}, {"defining_poly", poly}};
}

json witt_json(const WittElement& x) {
  json out = json::array();
  for (int i = 0; i < x.ring().deg(); ++i) out.push_back(std::to_string(x.coeff(i)));
  return out;
}

json matrix_json(const WittMatrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(witt_json(m(i, k)));
    out.push_back(row);
  }
  return out;
}

json crystal_json(const Crystal& c) {
  return json{{"p", c.p()},
              {"n", c.n()},
              {"s", c.s()},
              {"field", field_json(*c.ring().field())},
              {"exact", c.exact_lift()},
              {"matrix", matrix_json(c.matrix())}};
}

json polygon_json(const NewtonPolygon& nu) {
  json slopes = json::array(), breaks = json::array();
  for (const auto& s : nu.slopes()) slopes.push_back(to_string(s));
  for (const auto& bp : break_points(nu)) breaks.push_back(json::array({bp.a, std::to_string(bp.b)}));
  return json{{"slopes", slopes}, {"break_points", breaks}};
}

json counts_json(const std::vector<u64>& counts) {
  json out = json::array();
  for (u64 c : counts) out.push_back(std::to_string(c));
  return out;
}

}  // namespace cstrata::cli
