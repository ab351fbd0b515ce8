#include "nvmag/timeseries.hpp"

#include <cmath>
#include <numeric>

#include "nvmag/errors.hpp"

namespace nvmag {

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::tesla: return "tesla";
    case Unit::volts: return "volts";
    case Unit::dimensionless: return "dimensionless";
  }
  return "dimensionless";
}

std::optional<Unit> parse_unit(std::string_view text) {
  if (text == "tesla") return Unit::tesla;
  if (text == "volts") return Unit::volts;
  if (text == "dimensionless") return Unit::dimensionless;
  return std::nullopt;
}

std::size_t sample_count(double sample_rate, double duration) {
  if (!(sample_rate > 0.0) || !(duration >= 0.0) || !std::isfinite(sample_rate * duration))
    throw DomainError("sample_count: rate must be > 0 and duration >= 0");
  return static_cast<std::size_t>(std::llround(sample_rate * duration));
}

Timeseries Timeseries::zeros(double rate, double duration, Unit u) {
  return Timeseries(rate, std::vector<double>(sample_count(rate, duration), 0.0), u);
}

void Timeseries::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw DomainError("timeseries: sample_rate must be > 0");
  if (samples.empty()) throw DomainError("timeseries: empty record");
  for (double v : samples)
    if (!std::isfinite(v)) throw DomainError("timeseries: non-finite sample");
}

double mean(const Timeseries& ts) {
  if (ts.samples.empty()) return 0.0;
  return std::accumulate(ts.samples.begin(), ts.samples.end(), 0.0) /
         static_cast<double>(ts.samples.size());
}

double rms(const Timeseries& ts) {
  if (ts.samples.empty()) return 0.0;
  double acc = 0.0;
  for (double v : ts.samples) acc += v * v;
  return std::sqrt(acc / static_cast<double>(ts.samples.size()));
}

double standard_deviation(const Timeseries& ts) {
  if (ts.samples.size() < 2) return 0.0;
  const double m = mean(ts);
  double acc = 0.0;
  for (double v : ts.samples) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(ts.samples.size() - 1));
}

Timeseries scaled(const Timeseries& ts, double k) {
  Timeseries out = ts;
  for (double& v : out.samples) v *= k;
  return out;
}

Timeseries difference(const Timeseries& a, const Timeseries& b) {
  if (a.sample_rate != b.sample_rate || a.unit != b.unit || a.size() != b.size())
    throw CompositionError("difference: records differ in rate, unit or length");
  Timeseries out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] -= b.samples[i];
  return out;
}

}  // namespace nvmag
