#include "cstrata/newton_polygon.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "cstrata/error.hpp"

namespace cstrata {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational parse_rational(const std::string& text) {
  std::string t;
  for (char c : text)
    if (c != ' ' && c != '\t') t.push_back(c);
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      fail(ErrorKind::InvalidInput, "not a rational number: '" + text + "'");
    return v;
  };
  const auto slash = t.find('/');
  if (slash == std::string::npos) return Rational(parse_int(t));
  const std::int64_t num = parse_int(std::string_view(t).substr(0, slash));
  const std::int64_t den = parse_int(std::string_view(t).substr(slash + 1));
  if (den == 0) fail(ErrorKind::InvalidInput, "zero denominator in '" + text + "'");
  return Rational(num, den);
}

NewtonPolygon parse_polygon(const std::string& text) {
  std::string t;
  for (char c : text)
    if (c != ' ' && c != '{' && c != '}') t.push_back(c);
  std::vector<Rational> slopes;
  std::size_t start = 0;
  while (!t.empty() && start <= t.size()) {
    const auto comma = t.find(',', start);
    const auto end = comma == std::string::npos ? t.size() : comma;
    slopes.push_back(parse_rational(t.substr(start, end - start)));
    start = end + 1;
  }
  return NewtonPolygon::from_slopes(std::move(slopes));
}

NewtonPolygon NewtonPolygon::from_slopes(std::vector<Rational> slopes) {
  for (const auto& q : slopes)
    if (q < 0) fail(ErrorKind::InvalidInput, "negative slope " + to_string(q));
  std::sort(slopes.begin(), slopes.end());
  Rational acc = 0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    acc += slopes[i];
    const bool run_ends = (i + 1 == slopes.size()) || slopes[i + 1] != slopes[i];
    if (run_ends && acc.denominator() != 1)
      fail(ErrorKind::NonIntegralBreakPoint,
           "vertex (" + std::to_string(i + 1) + ", " + to_string(acc) + ") is not integral");
  }
  NewtonPolygon nu;
  nu.slopes_ = std::move(slopes);
  return nu;
}

NewtonPolygon NewtonPolygon::from_integers(const std::vector<std::int64_t>& slopes) {
  std::vector<Rational> q(slopes.begin(), slopes.end());
  return from_slopes(std::move(q));
}

std::int64_t NewtonPolygon::height() const { return value_at(rank()).numerator(); }

Rational NewtonPolygon::value_at(int i) const {
  if (i < 0 || i > rank()) fail(ErrorKind::BadIndex, "abscissa out of range");
  Rational acc = 0;
  for (int k = 0; k < i; ++k) acc += slopes_[k];
  return acc;
}

int NewtonPolygon::multiplicity(const Rational& slope) const {
  return static_cast<int>(std::count(slopes_.begin(), slopes_.end(), slope));
}

bool NewtonPolygon::integral() const {
  return std::all_of(slopes_.begin(), slopes_.end(), [](const Rational& q) { return q.denominator() == 1; });
}

std::string NewtonPolygon::str() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < slopes_.size(); ++i) os << (i ? "," : "") << to_string(slopes_[i]);
  os << "}";
  return os.str();
}

std::vector<BreakPoint> break_points(const NewtonPolygon& nu) {
  std::vector<BreakPoint> out{{0, 0}};
  const auto& s = nu.slopes();
  Rational acc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += s[i];
    if (i + 1 == s.size() || s[i + 1] != s[i]) out.push_back({static_cast<int>(i + 1), acc.numerator()});
  }
  return out;
}

bool lies_above(const NewtonPolygon& nu, const NewtonPolygon& nu0) {
  if (nu.rank() != nu0.rank())
    fail(ErrorKind::RankMismatch, "ranks " + std::to_string(nu.rank()) + " and " + std::to_string(nu0.rank()));
  Rational a = 0, b = 0;
  for (int i = 0; i < nu.rank(); ++i) {
    a += nu.slopes()[i];
    b += nu0.slopes()[i];
    if (a < b) return false;
  }
  return true;
}

NewtonPolygon exterior_power(const NewtonPolygon& nu, int a) {
  const int r = nu.rank();
  if (a < 1 || a > r) fail(ErrorKind::BadIndex, "exterior power index " + std::to_string(a) + " outside 1.." + std::to_string(r));
  double count = 1;
  for (int i = 0; i < a; ++i) count = count * (r - i) / (i + 1);
  if (count > static_cast<double>(kMaxExteriorRank)) fail(ErrorKind::TooLarge, "exterior power rank too large");
  std::vector<Rational> sums;
  std::vector<int> idx(a);
  for (int i = 0; i < a; ++i) idx[i] = i;
  const auto& s = nu.slopes();
  while (true) {
    Rational acc = 0;
    for (int i : idx) acc += s[i];
    sums.push_back(acc);
    int k = a - 1;
    while (k >= 0 && idx[k] == r - a + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < a; ++j) idx[j] = idx[j - 1] + 1;
  }
  return NewtonPolygon::from_slopes(std::move(sums));
}

bool has_break(const NewtonPolygon& nu, const BreakPoint& bp) {
  const auto bps = break_points(nu);
  return std::find(bps.begin(), bps.end(), bp) != bps.end();
}

NewtonPolygon scale_iterate(const NewtonPolygon& nu, std::int64_t q) {
  if (q < 1) fail(ErrorKind::InvalidInput, "iterate factor must be positive");
  std::vector<Rational> s = nu.slopes();
  for (auto& x : s) x *= q;
  return NewtonPolygon::from_slopes(std::move(s));
}

NewtonPolygon nu1(int r, std::int64_t b, std::int64_t d) {
  if (r < 2) fail(ErrorKind::Infeasible, "nu1 needs rank at least 2");
  if (b < 0) fail(ErrorKind::Infeasible, "negative b");
  const std::int64_t last = d - b - (r - 2) * (b + 1);
  if (last < b + 1)
    fail(ErrorKind::Infeasible, "final slope " + std::to_string(last) + " below b+1 for r=" + std::to_string(r) +
                                    " b=" + std::to_string(b) + " d=" + std::to_string(d));
  std::vector<std::int64_t> s{b};
  for (int i = 0; i < r - 2; ++i) s.push_back(b + 1);
  s.push_back(last);
  return NewtonPolygon::from_integers(s);
}

NewtonPolygon nu2(int r, std::int64_t b, std::int64_t d) {
  if (r < 1 || b < 0) fail(ErrorKind::Infeasible, "nu2 needs r >= 1 and b >= 0");
  if (r * (b + 1) > d)
    fail(ErrorKind::Infeasible, "r(b+1) = " + std::to_string(r * (b + 1)) + " exceeds d = " + std::to_string(d));
  std::vector<std::int64_t> s(r - 1, b + 1);
  s.push_back(d - (r - 1) * (b + 1));
  return NewtonPolygon::from_integers(s);
}

bool t_membership_via_nu(const NewtonPolygon& nu_x, std::int64_t b) {
  const int r = nu_x.rank();
  if (r < 2) fail(ErrorKind::PreconditionViolated, "rank must be at least 2");
  if (!nu_x.integral()) fail(ErrorKind::PreconditionViolated, "slopes must be integers; iterate first");
  const std::int64_t d = nu_x.height();
  NewtonPolygon lower;
  try {
    lower = nu1(r, b, d);
  } catch (const Error& e) {
    fail(ErrorKind::PreconditionViolated, std::string("nu1 undefined: ") + e.what());
  }
  if (!lies_above(nu_x, lower)) fail(ErrorKind::PreconditionViolated, nu_x.str() + " is not above " + lower.str());
  if (r * (b + 1) > d) return true;
  return !lies_above(nu_x, nu2(r, b, d));
}

}  // namespace cstrata
