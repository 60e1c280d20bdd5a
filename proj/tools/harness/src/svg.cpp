#include "osc_harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osc::harness {

namespace {

constexpr double kW = 360, kH = 280, kLeft = 64, kRight = 16, kTop = 32, kBottom = 44;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

void panel(std::ostringstream& os, const PlotPanel& p, double x0) {
  std::vector<double> ys;
  for (double v : p.values)
    if (v > 0.0 && std::isfinite(v)) ys.push_back(std::log10(v));
  double lo = ys.empty() ? -1.0 : std::floor(*std::min_element(ys.begin(), ys.end()));
  double hi = ys.empty() ? 0.0 : std::ceil(*std::max_element(ys.begin(), ys.end()));
  if (hi <= lo) hi = lo + 1.0;
  const double kmax = std::max<double>(1.0, static_cast<double>(p.values.size()) - 1.0);
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto X = [&](double k) { return x0 + kLeft + pw * k / kmax; };
  auto Y = [&](double ly) { return kTop + ph * (hi - ly) / (hi - lo); };

  os << "<rect x='" << x0 + kLeft << "' y='" << kTop << "' width='" << pw << "' height='" << ph
     << "' fill='none' stroke='black'/>\n";
  os << "<text x='" << x0 + kW / 2 << "' y='20' text-anchor='middle' font-size='13'>" << escape(p.title)
     << "</text>\n";
  const int step = hi - lo > 10 ? 2 : 1;
  for (int d = static_cast<int>(lo); d <= static_cast<int>(hi); d += step) {
    os << "<line x1='" << x0 + kLeft << "' x2='" << x0 + kLeft + pw << "' y1='" << Y(d) << "' y2='" << Y(d)
       << "' stroke='#ddd'/>\n";
    os << "<text x='" << x0 + kLeft - 6 << "' y='" << Y(d) + 4 << "' text-anchor='end' font-size='11'>1e" << d
       << "</text>\n";
  }
  for (int k = 0; k <= static_cast<int>(kmax); ++k)
    os << "<text x='" << X(k) << "' y='" << kTop + ph + 16 << "' text-anchor='middle' font-size='11'>" << k
       << "</text>\n";
  os << "<text x='" << x0 + kLeft + pw / 2 << "' y='" << kH - 8 << "' text-anchor='middle' font-size='12'>iteration"
     << "</text>\n";
  os << "<text transform='translate(" << x0 + 14 << ',' << kTop + ph / 2
     << ") rotate(-90)' text-anchor='middle' font-size='12'>" << escape(p.ylabel) << "</text>\n";

  std::ostringstream pts;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const double v = p.values[k];
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    pts << X(static_cast<double>(k)) << ',' << Y(std::log10(v)) << ' ';
    os << "<circle cx='" << X(static_cast<double>(k)) << "' cy='" << Y(std::log10(v))
       << "' r='3' fill='steelblue'/>\n";
  }
  os << "<polyline points='" << pts.str() << "' fill='none' stroke='steelblue' stroke-width='1.5'/>\n";
}

}  // namespace

std::string semilog_svg(const std::vector<PlotPanel>& panels) {
  std::ostringstream os;
  const double width = kW * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << kH << "' viewBox='0 0 "
     << width << ' ' << kH << "' font-family='sans-serif'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) panel(os, panels[i], kW * static_cast<double>(i));
  os << "</svg>\n";
  return os.str();
}

}  // namespace osc::harness
