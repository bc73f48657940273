#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace cstrata::cli {

namespace {

constexpr double kWidth = 360, kHeight = 260, kMargin = 40, kTitle = 24;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

void panel(std::ostringstream& os, double top, const std::string& title, const NewtonPolygon& nu) {
  const int r = std::max(1, nu.rank());
  const double d = std::max<double>(1, static_cast<double>(nu.height()));
  const double x0 = kMargin, y0 = top + kHeight - kMargin;
  const double sx = (kWidth - 2 * kMargin) / r, sy = (kHeight - 2 * kMargin - kTitle) / d;
  auto X = [&](double a) { return x0 + a * sx; };
  auto Y = [&](double b) { return y0 - b * sy; };

  os << "<text x=\"" << fmt(kMargin) << "\" y=\"" << fmt(top + 18) << "\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<g stroke=\"#ddd\" stroke-width=\"1\">\n";
  for (int a = 0; a <= r; ++a)
    os << "<line x1=\"" << fmt(X(a)) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(X(a)) << "\" y2=\"" << fmt(Y(d)) << "\"/>\n";
  for (int b = 0; b <= static_cast<int>(d); ++b)
    os << "<line x1=\"" << fmt(X(0)) << "\" y1=\"" << fmt(Y(b)) << "\" x2=\"" << fmt(X(r)) << "\" y2=\"" << fmt(Y(b)) << "\"/>\n";
  os << "</g>\n";
  os << "<line x1=\"" << fmt(X(0)) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(X(r)) << "\" y2=\"" << fmt(Y(0))
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << fmt(X(0)) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(X(0)) << "\" y2=\"" << fmt(Y(d))
     << "\" stroke=\"black\"/>\n";
  if (nu.rank() == 0) return;

  const auto bps = break_points(nu);
  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < bps.size(); ++i)
    os << (i ? " " : "") << fmt(X(bps[i].a)) << "," << fmt(Y(static_cast<double>(bps[i].b)));
  os << "\"/>\n";
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const double cx = X(bps[i].a), cy = Y(static_cast<double>(bps[i].b));
    os << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"3\" fill=\"#1f4e9c\"/>\n";
    os << "<text x=\"" << fmt(cx + 4) << "\" y=\"" << fmt(cy + 14) << "\" font-size=\"11\">(" << bps[i].a << "," << bps[i].b
       << ")</text>\n";
    if (i + 1 < bps.size()) {
      const Rational slope(bps[i + 1].b - bps[i].b, bps[i + 1].a - bps[i].a);
      const double mx = (cx + X(bps[i + 1].a)) / 2, my = (cy + Y(static_cast<double>(bps[i + 1].b))) / 2;
      os << "<text x=\"" << fmt(mx - 6) << "\" y=\"" << fmt(my - 6) << "\" font-size=\"11\" fill=\"#9c1f1f\">" << to_string(slope)
         << "</text>\n";
    }
  }
}

}  // namespace

std::string polygons_svg(const std::vector<std::pair<std::string, NewtonPolygon>>& panels) {
  std::ostringstream os;
  const double total = kHeight * std::max<std::size_t>(1, panels.size());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(total)
     << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) panel(os, kHeight * static_cast<double>(i), panels[i].first, panels[i].second);
  os << "</svg>\n";
  return os.str();
}

}  // namespace cstrata::cli
