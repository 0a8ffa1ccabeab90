#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rabi::cli {

/// Shortest round-trip-safe text for a double ("nan", "inf" and "-inf" for
/// non-finite values).
std::string format_number(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_metadata(const std::string& key, const std::string& value);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const noexcept { return rows_.size(); }

  std::string render() const;
  void write(const std::filesystem::path& path) const { write_file_atomic(path, render()); }

 private:
  std::vector<std::string> metadata_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Minimal SVG line plot: frame, ticks, one polyline per series and a legend.
std::string render_svg(const Plot& plot);

}  // namespace rabi::cli
