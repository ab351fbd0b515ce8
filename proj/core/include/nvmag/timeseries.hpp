#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nvmag {

enum class Unit { tesla, volts, dimensionless };

std::string_view to_string(Unit unit);
std::optional<Unit> parse_unit(std::string_view text);

/// Uniformly sampled record. Sample i sits at time i / sample_rate.
struct Timeseries {
  double sample_rate = 0.0;  // Hz
  std::vector<double> samples;
  Unit unit = Unit::tesla;

  Timeseries() = default;
  Timeseries(double rate, std::vector<double> values, Unit u = Unit::tesla)
      : sample_rate(rate), samples(std::move(values)), unit(u) {}

  /// Zero-filled record of round(duration * rate) samples.
  static Timeseries zeros(double rate, double duration, Unit u = Unit::tesla);

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double time(std::size_t i) const { return static_cast<double>(i) / sample_rate; }

  /// Throws DomainError when rate <= 0, empty, or any sample is non-finite.
  void validate() const;
};

std::size_t sample_count(double sample_rate, double duration);

double mean(const Timeseries& ts);
double rms(const Timeseries& ts);
double standard_deviation(const Timeseries& ts);

/// Same record, each sample multiplied by k.
Timeseries scaled(const Timeseries& ts, double k);
/// Pointwise a - b (same checks as compose).
Timeseries difference(const Timeseries& a, const Timeseries& b);

}  // namespace nvmag
