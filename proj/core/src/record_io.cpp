#include "nvmag/record_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nvmag/errors.hpp"

namespace nvmag::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  return is;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw IoError("malformed number: '" + text + "'");
  return v;
}

void write_record(std::ostream& os, const RecordFile& file) {
  const Timeseries& ts = file.record;
  ts.validate();
  os << "# sample_rate_hz=" << format_double(ts.sample_rate)
     << " seed=" << (file.seed ? std::to_string(*file.seed) : std::string("none")) << '\n';
  os << "time_s,value,unit\n";
  const std::string unit(to_string(ts.unit));
  std::string line;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    line.clear();
    line += format_double(ts.time(i));
    line += ',';
    line += format_double(ts.samples[i]);
    line += ',';
    line += unit;
    line += '\n';
    os << line;
  }
  if (!os) throw IoError("write_record: stream failure");
}

void write_record(const std::filesystem::path& path, const RecordFile& file) {
  auto os = open_out(path);
  write_record(os, file);
}

RecordFile read_record(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("record: missing metadata line");
  strip_cr(line);
  if (line.rfind("# ", 0) != 0) throw IoError("record: first line must be a '# ' metadata comment");

  RecordFile out;
  std::optional<double> rate;
  std::istringstream meta(line.substr(2));
  std::string token;
  while (meta >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw IoError("record: malformed metadata token '" + token + "'");
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "sample_rate_hz") {
      rate = parse_double(value);
    } else if (key == "seed") {
      if (value != "none") {
        std::uint64_t s = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), s);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size())
          throw IoError("record: malformed seed '" + value + "'");
        out.seed = s;
      }
    }
  }
  if (!rate || !(*rate > 0.0)) throw IoError("record: missing or invalid sample_rate_hz");

  if (!std::getline(is, line)) throw IoError("record: missing header row");
  strip_cr(line);
  if (line != "time_s,value,unit") throw IoError("record: header must be 'time_s,value,unit'");

  out.record.sample_rate = *rate;
  std::optional<Unit> unit;
  const double step = 1.0 / *rate;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw IoError("record: row " + std::to_string(row) + " needs 3 columns");
    const double t = parse_double(cells[0]);
    const double v = parse_double(cells[1]);
    const auto u = parse_unit(cells[2]);
    if (!u) throw IoError("record: unknown unit '" + cells[2] + "'");
    if (unit && *u != *unit) throw IoError("record: unit changes within the record");
    unit = u;
    const double expected = static_cast<double>(row) / *rate;
    if (std::abs(t - expected) > 1e-6 * step)
      throw IoError("record: time column is not at fixed step 1/sample_rate (row " +
                    std::to_string(row) + ")");
    out.record.samples.push_back(v);
    ++row;
  }
  if (!unit) throw IoError("record: no samples");
  out.record.unit = *unit;
  return out;
}

RecordFile read_record(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_record(is);
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  auto os = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw IoError("write_table: row width differs from header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
    os << '\n';
  }
  if (!os) throw IoError("write_table: stream failure on " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  auto is = open_in(path);
  Table t;
  std::string line;
  while (std::getline(is, line)) {
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line, ',');
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) throw IoError("read_table: row width differs from header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError("read_table: missing header in " + path.string());
  return t;
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(s.frequencies.size());
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) rows.push_back({s.frequencies[k], s.density[k]});
  write_table(path, {"frequency_hz", "density"}, rows);
}

Spectrum read_spectrum(const std::filesystem::path& path) {
  const Table t = read_table(path);
  if (t.header != std::vector<std::string>{"frequency_hz", "density"})
    throw IoError("spectrum: header must be 'frequency_hz,density'");
  Spectrum s;
  for (const auto& r : t.rows) {
    s.frequencies.push_back(r[0]);
    s.density.push_back(r[1]);
  }
  return s;
}

void write_pgm(const std::filesystem::path& path, const ImageU16& img, std::uint16_t maxval) {
  if (maxval == 0) throw IoError("write_pgm: maxval must be > 0");
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os << "P5\n" << img.width << ' ' << img.height << '\n' << maxval << '\n';
  const bool wide = maxval > 255;
  for (std::uint16_t v : img.pixels) {
    if (v > maxval) throw IoError("write_pgm: pixel exceeds maxval");
    if (wide) os.put(static_cast<char>(v >> 8));
    os.put(static_cast<char>(v & 0xff));
  }
  if (!os) throw IoError("write_pgm: stream failure on " + path.string());
}

ImageU16 read_pgm(const std::filesystem::path& path, std::uint16_t* maxval_out) {
  auto is = open_in(path, std::ios::in | std::ios::binary);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw IoError("read_pgm: not a binary PGM");
  auto next_int = [&]() {
    is >> std::ws;
    while (is.peek() == '#') {
      std::string comment;
      std::getline(is, comment);
      is >> std::ws;
    }
    long v = -1;
    is >> v;
    if (!is || v < 0) throw IoError("read_pgm: malformed header");
    return v;
  };
  const long w = next_int(), h = next_int(), maxval = next_int();
  if (maxval < 1 || maxval > 65535) throw IoError("read_pgm: maxval out of range");
  is.get();  // single whitespace before raster
  ImageU16 img(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  const bool wide = maxval > 255;
  for (auto& v : img.pixels) {
    int hi = is.get();
    if (wide) {
      const int lo = is.get();
      if (lo == EOF) throw IoError("read_pgm: truncated raster");
      v = static_cast<std::uint16_t>((hi << 8) | lo);
    } else {
      v = static_cast<std::uint16_t>(hi);
    }
    if (hi == EOF) throw IoError("read_pgm: truncated raster");
  }
  if (maxval_out) *maxval_out = static_cast<std::uint16_t>(maxval);
  return img;
}

}  // namespace nvmag::io
