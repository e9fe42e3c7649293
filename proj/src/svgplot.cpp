#include "svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "runlog.hpp"

namespace erc {

namespace {

constexpr double kW = 960, kH = 560;
constexpr double kLeft = 70, kRight = 930, kTop = 40, kBottom = 500;
const char* kPalette[8] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Series {
  std::vector<std::pair<double, double>> pts;  // sorted by x
};

struct Group {
  std::string label;
  std::vector<Series> runs;
  std::vector<double> gx, gmean, gsd;  // resampled
};

double interp(const Series& s, double x) {
  const auto& p = s.pts;
  if (x <= p.front().first) return p.front().second;
  if (x >= p.back().first) return p.back().second;
  std::size_t lo = 0, hi = p.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (p[mid].first <= x) lo = mid; else hi = mid;
  }
  const double t = (x - p[lo].first) / (p[hi].first - p[lo].first);
  return p[lo].second + t * (p[hi].second - p[lo].second);
}

}  // namespace

void emit_plot(const std::vector<std::string>& csv_paths,
               const std::string& column, const std::string& out_svg) {
  if (csv_paths.empty()) throw std::invalid_argument("plot: no input CSVs");

  std::map<std::string, Group> groups;
  for (const auto& path : csv_paths) {
    const RunTable t = read_runlog_csv(path);
    if (t.column_index(column) < 0) {
      std::string cols;
      for (const auto& c : t.columns) cols += (cols.empty() ? "" : ", ") + c;
      throw std::invalid_argument("plot: no column '" + column + "' in " +
                                  path + " (available: " + cols + ")");
    }
    std::string key;
    if (!t.metadata.empty()) {
      for (const auto& [k, v] : t.metadata)
        if (k != "seed") key += k + "=" + v + " ";
      if (!key.empty()) key.pop_back();
    } else {
      key = path;
    }
    Series s;
    s.pts = t.series(column);
    std::sort(s.pts.begin(), s.pts.end());
    if (s.pts.empty()) continue;  // nothing usable in this run
    auto& g = groups[key];
    g.label = key;
    g.runs.push_back(std::move(s));
  }

  // resample each group onto a common grid and band it
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [key, g] : groups) {
    double lo = -1e300, hi = 1e300;
    for (const auto& s : g.runs) {
      lo = std::max(lo, s.pts.front().first);
      hi = std::min(hi, s.pts.back().first);
    }
    if (hi < lo) hi = lo;
    const int npts = hi > lo ? 200 : 1;
    for (int i = 0; i < npts; ++i) {
      const double x =
          npts == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(npts - 1);
      double mean = 0;
      for (const auto& s : g.runs) mean += interp(s, x);
      mean /= g.runs.size();
      double var = 0;
      for (const auto& s : g.runs) {
        const double d = interp(s, x) - mean;
        var += d * d;
      }
      const double sd = std::sqrt(var / g.runs.size());
      g.gx.push_back(x);
      g.gmean.push_back(mean);
      g.gsd.push_back(sd);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, mean - sd);
      ymax = std::max(ymax, mean + sd);
    }
  }
  if (groups.empty() || xmin > xmax) {
    xmin = 0; xmax = 1; ymin = 0; ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto X = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft);
  };
  auto Y = [&](double y) {
    return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
     << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
     << "\" fill=\"white\"/>\n";

  // axes and ticks
  os << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
     << "\" y2=\"" << kBottom << "\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
     << "\" y2=\"" << kBottom << "\"/>\n";
  os << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    os << "<line x1=\"" << X(fx) << "\" y1=\"" << kBottom << "\" x2=\""
       << X(fx) << "\" y2=\"" << kBottom + 5 << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << X(fx) << "\" y=\"" << kBottom + 20
       << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << Y(fy) << "\" x2=\""
       << kLeft << "\" y2=\"" << Y(fy) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << Y(fy) + 4
       << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 38
     << "\" text-anchor=\"middle\">env_step</text>\n";
  os << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (kTop + kBottom) / 2 << ")\">" << esc(column) << "</text>\n";
  os << "</g>\n";

  int color = 0;
  double legend_y = kTop + 6;
  for (const auto& [key, g] : groups) {
    const char* c = kPalette[color % 8];
    ++color;
    // band
    if (g.gx.size() > 1) {
      os << "<polygon fill=\"" << c << "\" fill-opacity=\"0.18\" "
         << "stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < g.gx.size(); ++i)
        os << X(g.gx[i]) << "," << Y(g.gmean[i] + g.gsd[i]) << " ";
      for (std::size_t i = g.gx.size(); i-- > 0;)
        os << X(g.gx[i]) << "," << Y(g.gmean[i] - g.gsd[i]) << " ";
      os << "\"/>\n";
      os << "<polyline fill=\"none\" stroke=\"" << c
         << "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t i = 0; i < g.gx.size(); ++i)
        os << X(g.gx[i]) << "," << Y(g.gmean[i]) << " ";
      os << "\"/>\n";
    } else if (g.gx.size() == 1) {
      os << "<circle cx=\"" << X(g.gx[0]) << "\" cy=\"" << Y(g.gmean[0])
         << "\" r=\"4\" fill=\"" << c << "\"/>\n";
    }
    os << "<g font-family=\"sans-serif\" font-size=\"12\">"
       << "<rect x=\"" << kLeft + 10 << "\" y=\"" << legend_y - 9
       << "\" width=\"14\" height=\"14\" fill=\"" << c << "\"/>"
       << "<text x=\"" << kLeft + 30 << "\" y=\"" << legend_y + 3
       << "\">" << esc(g.label) << " (" << g.runs.size() << " run"
       << (g.runs.size() == 1 ? "" : "s") << ")</text></g>\n";
    legend_y += 20;
  }
  if (groups.empty())
    os << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\""
       << (kTop + kBottom) / 2
       << "\" font-family=\"sans-serif\" font-size=\"16\" "
          "text-anchor=\"middle\">no data</text>\n";
  os << "</svg>\n";

  std::ofstream out(out_svg, std::ios::binary);
  if (!out) throw std::runtime_error("plot: cannot write " + out_svg);
  out << os.str();
}

}  // namespace erc
