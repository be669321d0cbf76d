#include "slipstokes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace slipstokes {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SpMat<double> symmetrized(const SpMat<double>& a) {
  SpMat<double> at = SpMat<double>(a.transpose());
  SpMat<double> s = a + at;
  s *= 0.5;
  s.makeCompressed();
  return s;
}

SpMat<double> from_triplets_stable(int rows, int cols, std::vector<Triplet>& trips) {
  struct Entry {
    int r, c;
    size_t seq;
    double v;
  };
  std::vector<Entry> ent(trips.size());
  for (size_t i = 0; i < trips.size(); ++i)
    ent[i] = {trips[i].row(), trips[i].col(), i, trips[i].value()};
  std::sort(ent.begin(), ent.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.r, a.c, a.seq) < std::tie(b.r, b.c, b.seq);
  });
  std::vector<Triplet> merged;
  merged.reserve(ent.size());
  size_t i = 0;
  while (i < ent.size()) {
    int r = ent[i].r, c = ent[i].c;
    double v = 0;
    while (i < ent.size() && ent[i].r == r && ent[i].c == c) v += ent[i++].v;
    merged.emplace_back(r, c, v);
  }
  SpMat<double> m(rows, cols);
  m.setFromTriplets(merged.begin(), merged.end());
  m.makeCompressed();
  return m;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("degenerate-fit", "need at least two points");
  double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw Error("degenerate-fit", "collinear abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw Error("csv", "row width does not match header");
  rows_.push_back(values);
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < columns_.size(); ++i)
    os << columns_[i] << (i + 1 < columns_.size() ? "," : "");
  os << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i)
      os << fmt17(row[i]) << (i + 1 < row.size() ? "," : "");
    os << "\n";
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw Error("io", "cannot write " + path.string());
  f << to_string();
}

std::vector<double> CsvTable::column(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw Error("missing-column", name);
  size_t k = size_t(it - columns_.begin());
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[k]);
  return out;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("io", "cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw Error("csv", "empty file");
  std::vector<std::string> cols;
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) cols.push_back(tok);
  CsvTable t(cols);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
    t.add_row(row);
  }
  return t;
}

std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
  const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if ((spec.logx && s.x[i] <= 0) || (spec.logy && s.y[i] <= 0)) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb); };
  static const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8540", "#7b4ea3",
                                 "#b8860b", "#008080", "#888888"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << spec.title << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb << "\" fill=\"none\" stroke=\"#999\"/>\n";
  // guide lines through the midpoint of the first series
  if (!series.empty() && !series[0].x.empty()) {
    size_t mid = series[0].x.size() / 2;
    double x0 = series[0].x[mid], y0 = series[0].y[mid];
    for (double sl : spec.guide_slopes) {
      double xa = spec.logx ? std::pow(10, xmin) : xmin;
      double xb = spec.logx ? std::pow(10, xmax) : xmax;
      double ya = y0 * std::pow(xa / x0, sl);
      double yb = y0 * std::pow(xb / x0, sl);
      os << "<line x1=\"" << fmt17(px(xa)) << "\" y1=\"" << fmt17(py(ya)) << "\" x2=\""
         << fmt17(px(xb)) << "\" y2=\"" << fmt17(py(yb))
         << "\" stroke=\"#bbb\" stroke-dasharray=\"6,4\"/>\n";
      os << "<text x=\"" << fmt17(px(xb) - 60) << "\" y=\"" << fmt17(py(yb) - 4)
         << "\" font-size=\"11\" fill=\"#777\">slope " << sl << "</text>\n";
    }
  }
  for (size_t s = 0; s < series.size(); ++s) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[s % 7] << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      if ((spec.logx && series[s].x[i] <= 0) || (spec.logy && series[s].y[i] <= 0)) continue;
      os << fmt17(px(series[s].x[i])) << "," << fmt17(py(series[s].y[i])) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - mr - 150 << "\" y=\"" << mt + 16 + 14 * double(s)
       << "\" font-size=\"12\" fill=\"" << colors[s % 7] << "\">" << series[s].label
       << "</text>\n";
  }
  // axis extremes
  os << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" font-size=\"11\">"
     << fmt17(spec.logx ? std::pow(10, xmin) : xmin) << "</text>\n";
  os << "<text x=\"" << W - mr - 40 << "\" y=\"" << H - mb + 16 << "\" font-size=\"11\">"
     << fmt17(spec.logx ? std::pow(10, xmax) : xmax) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace slipstokes
