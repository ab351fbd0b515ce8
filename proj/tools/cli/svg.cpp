#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "nvmag/errors.hpp"

namespace nvmag::cli::svg {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
constexpr int kMaxPoints = 4000;
constexpr int kMaxColumns = 400;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void frame(std::ostringstream& os, const std::string& title, const std::string& xl, const std::string& yl) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << escape(xl)
     << "</text>\n";
  os << "<text transform=\"translate(18," << kHeight / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(yl) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
     << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
}

// Perceptually ordered ramp from dark blue through teal to yellow.
std::string color_for(double v) {
  v = std::clamp(v, 0.0, 1.0);
  static constexpr double stops[][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  const double pos = v * 4.0;
  const int i = std::min(3, static_cast<int>(pos));
  const double f = pos - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

}  // namespace

std::string render(const LinePlot& plot) {
  double x0 = plot.x_min, x1 = plot.x_max;
  const bool fit_x = x0 == 0.0 && x1 == 0.0;
  if (fit_x) {
    x0 = std::numeric_limits<double>::infinity();
    x1 = -x0;
  }
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (fit_x) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
      } else if (s.x[i] < x0 || s.x[i] > x1) {
        continue;
      }
      const double y = s.y[i];
      if (plot.log_y && !(y > 0.0)) continue;
      y0 = std::min(y0, plot.log_y ? std::log10(y) : y);
      y1 = std::max(y1, plot.log_y ? std::log10(y) : y);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  if (plot.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - ((plot.log_y ? std::log10(y) : y) - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  frame(os, plot.title, plot.x_label, plot.y_label);
  for (int t = 0; t <= 5; ++t) {
    const double x = x0 + (x1 - x0) * t / 5.0;
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
       << tick_label(x) << "</text>\n";
  }
  if (plot.log_y) {
    for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e) {
      const double y = kTop + ph - (e - y0) / (y1 - y0) * ph;
      os << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << num(y) << "\" y2=\"" << num(y)
         << "\" stroke=\"#ddd\"/>\n";
      os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
  } else {
    for (int t = 0; t <= 5; ++t) {
      const double v = y0 + (y1 - y0) * t / 5.0;
      os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(kTop + ph - ph * t / 5.0 + 4)
         << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
  }

  int legend = 0;
  for (const auto& s : plot.series) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (s.x[i] >= x0 && s.x[i] <= x1) ++count;
    const std::size_t stride = std::max<std::size_t>(1, count / kMaxPoints);
    os << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1\" points=\"";
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (s.x[i] < x0 || s.x[i] > x1 || (plot.log_y && !(s.y[i] > 0.0))) continue;
      if (seen++ % stride != 0) continue;
      os << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    const double ly = kTop + 16 + 16 * legend++;
    os << "<line x1=\"" << kWidth - kRight - 150 << "\" x2=\"" << kWidth - kRight - 130 << "\" y1=\"" << ly - 4
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kWidth - kRight - 124 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render(const Heatmap& map) {
  std::ostringstream os;
  frame(os, map.title, map.x_label, map.y_label);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const std::size_t bins = map.x.size();
  if (bins == 0 || map.rows.empty()) {
    os << "</svg>\n";
    return os.str();
  }
  // Columns combine adjacent bins by their maximum so narrow ridges survive.
  const std::size_t group = (bins + kMaxColumns - 1) / kMaxColumns;
  const std::size_t columns = (bins + group - 1) / group;
  const double cw = pw / static_cast<double>(columns);
  const double rh = ph / static_cast<double>(map.rows.size());
  for (std::size_t r = 0; r < map.rows.size(); ++r) {
    const double y = kTop + ph - rh * static_cast<double>(r + 1);
    for (std::size_t c = 0; c < columns; ++c) {
      double v = 0.0;
      for (std::size_t k = c * group; k < std::min(bins, (c + 1) * group); ++k)
        if (k < map.rows[r].size()) v = std::max(v, map.rows[r][k]);
      os << "<rect x=\"" << num(kLeft + cw * static_cast<double>(c)) << "\" y=\"" << num(y) << "\" width=\""
         << num(cw + 0.5) << "\" height=\"" << num(rh + 0.5) << "\" fill=\"" << color_for(v) << "\"/>\n";
    }
  }
  for (int t = 0; t <= 5; ++t) {
    const double x = map.x.front() + (map.x.back() - map.x.front()) * t / 5.0;
    os << "<text x=\"" << num(kLeft + pw * t / 5.0) << "\" y=\"" << kHeight - kBottom + 16
       << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  for (std::size_t r = 0; r < map.rows.size(); ++r) {
    if (map.rows.size() > 12 && r % (map.rows.size() / 6) != 0) continue;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(kTop + ph - rh * (static_cast<double>(r) + 0.5) + 4)
       << "\" text-anchor=\"end\">" << r << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write(const std::filesystem::path& path, const std::string& document) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << document;
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace nvmag::cli::svg
