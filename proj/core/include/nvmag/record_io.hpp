#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nvmag/spectral.hpp"
#include "nvmag/timeseries.hpp"
#include "nvmag/widefield.hpp"

namespace nvmag::io {

/// Record CSV:
///   # sample_rate_hz=<rate> seed=<seed|none>
///   time_s,value,unit
///   <t>,<value>,<unit>
/// Numbers use the shortest round-trip representation, so
/// read(write(x)) reproduces every finite sample bit for bit.
struct RecordFile {
  Timeseries record;
  std::optional<std::uint64_t> seed;
};

void write_record(std::ostream& os, const RecordFile& file);
void write_record(const std::filesystem::path& path, const RecordFile& file);
RecordFile read_record(std::istream& is);
RecordFile read_record(const std::filesystem::path& path);

/// Spectrum CSV with header `frequency_hz,density`.
void write_spectrum(const std::filesystem::path& path, const Spectrum& s);
Spectrum read_spectrum(const std::filesystem::path& path);

/// Plain table with a header row; cells formatted as shortest round-trip doubles.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
Table read_table(const std::filesystem::path& path);

/// Binary PGM (P5). maxval > 255 stores 16-bit big-endian samples.
void write_pgm(const std::filesystem::path& path, const ImageU16& img, std::uint16_t maxval = 65535);
ImageU16 read_pgm(const std::filesystem::path& path, std::uint16_t* maxval = nullptr);

/// Shortest round-trip text for a double.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace nvmag::io
