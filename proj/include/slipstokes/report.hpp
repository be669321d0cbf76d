#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "slipstokes/core.hpp"

namespace slipstokes {

/// %.17g formatting used for every floating-point value in text artifacts,
/// so repeated runs are byte-identical and values round-trip exactly.
std::string fmt17(double v);

/// Column-oriented CSV table; rows are written in insertion order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::string to_string() const;
  void write(const std::filesystem::path& path) const;
  /// column lookup; throws Error("missing-column") if absent
  std::vector<double> column(const std::string& name) const;
  static CsvTable read(const std::filesystem::path& path);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Minimal deterministic SVG line plot (no timestamps, fixed viewport).
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
struct PlotSpec {
  std::string title;
  bool logx = false, logy = false;
  /// reference guide lines drawn as y = c * x^slope through the data midpoint
  std::vector<double> guide_slopes;
};
std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace slipstokes
