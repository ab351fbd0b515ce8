#include "nvmag/lockin.hpp"

#include <cmath>
#include <numbers>

#include "nvmag/errors.hpp"

namespace nvmag {

void FmDriveConfig::validate() const {
  if (!(modulation_frequency > 0.0)) throw DomainError("fm drive: modulation_frequency must be > 0");
  if (!(peak_deviation > 0.0)) throw DomainError("fm drive: peak_deviation must be > 0");
  if (three_tone_enabled && !(three_tone_spacing > 0.0))
    throw DomainError("fm drive: three_tone_spacing must be > 0 when three-tone drive is enabled");
  if (integration_periods < 1) throw DomainError("fm drive: integration_periods must be >= 1");
  if (samples_per_period < 4 || samples_per_period % 2 != 0)
    throw DomainError("fm drive: samples_per_period must be even and >= 4");
}

void DemodCurve::validate() const {
  if (carrier_grid.size() != demod_values.size())
    throw DomainError("demod curve: grid and values differ in length");
  if (carrier_grid.empty()) throw DomainError("demod curve: empty");
  for (std::size_t i = 1; i < carrier_grid.size(); ++i)
    if (!(carrier_grid[i] > carrier_grid[i - 1]))
      throw DomainError("demod curve: grid must be strictly increasing");
}

double demod_response(const OdmrModel& model, const FmDriveConfig& drive, double carrier) {
  model.validate();
  drive.validate();
  // three-tone drive: hyperfine lines addressed together, one effective line
  const OdmrModel effective = drive.three_tone_enabled ? model.collapsed() : model;

  // The response only depends on the modulation phase, so sampling each
  // period at the same phases and summing over whole periods is exact for
  // the harmonic content below samples_per_period / 2.
  const int n = drive.integration_periods * drive.samples_per_period;
  const double dphase = 2.0 * std::numbers::pi / drive.samples_per_period;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(dphase * (k % drive.samples_per_period));
    acc += lineshape(effective, carrier + drive.peak_deviation * s) * s;
  }
  return 2.0 * acc / n;
}

DemodCurve sweep_demod(const OdmrModel& model, const FmDriveConfig& drive,
                       std::span<const double> grid) {
  DemodCurve curve;
  curve.carrier_grid.assign(grid.begin(), grid.end());
  curve.demod_values.reserve(grid.size());
  for (double f : grid) curve.demod_values.push_back(demod_response(model, drive, f));
  curve.validate();
  return curve;
}

double track_setpoint(const DemodCurve& curve) {
  curve.validate();
  const auto& f = curve.carrier_grid;
  const auto& v = curve.demod_values;
  const std::size_t n = f.size();
  if (n < 2) throw NoSetpointError("track_setpoint: need at least two grid points");

  auto slope_at = [&](std::size_t i) {
    if (i == 0) return (v[1] - v[0]) / (f[1] - f[0]);
    if (i == n - 1) return (v[n - 1] - v[n - 2]) / (f[n - 1] - f[n - 2]);
    return (v[i + 1] - v[i - 1]) / (f[i + 1] - f[i - 1]);
  };

  std::size_t best = 0;
  double best_mag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::abs(slope_at(i));
    if (m > best_mag * (1.0 + 1e-12)) {
      best_mag = m;
      best = i;
    }
  }
  if (!(best_mag > 0.0)) throw NoSetpointError("track_setpoint: demodulated curve is flat");
  return f[best];
}

double demod_slope(const OdmrModel& model, const FmDriveConfig& drive) {
  const double h = model.fwhm * 1e-4;
  const double c = drive.carrier_frequency;
  return (demod_response(model, drive, c + h) - demod_response(model, drive, c - h)) / (2.0 * h);
}

double field_to_voltage(const OdmrModel& model, const FmDriveConfig& drive,
                        double responsivity_calibration, double b) {
  return demod_slope(model, drive) * model.gyromagnetic_response * b * responsivity_calibration;
}

double voltage_to_field(const OdmrModel& model, const FmDriveConfig& drive,
                        double responsivity_calibration, double volts) {
  const double k = demod_slope(model, drive) * model.gyromagnetic_response * responsivity_calibration;
  if (k == 0.0) throw DomainError("voltage_to_field: zero responsivity at the carrier");
  return volts / k;
}

double simulated_voltage(const OdmrModel& model, const FmDriveConfig& drive,
                         double responsivity_calibration, double b) {
  // Moving the resonance up by df looks, to a fixed carrier, like moving the
  // carrier down by df; the sign matches the small-signal formula.
  const double df = zeeman_shift(model, b);
  const double c = drive.carrier_frequency;
  return (demod_response(model, drive, c) - demod_response(model.shifted(df), drive, c)) *
         responsivity_calibration;
}

}  // namespace nvmag
