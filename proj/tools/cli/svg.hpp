#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nvmag::cli::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  double x_min = 0.0, x_max = 0.0;  // both 0: fit to data
  std::vector<Series> series;
};

// Rows are stacked bottom to top; values are expected in [0, 1].
struct Heatmap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<std::vector<double>> rows;
};

std::string render(const LinePlot& plot);
std::string render(const Heatmap& map);
void write(const std::filesystem::path& path, const std::string& document);

}  // namespace nvmag::cli::svg
