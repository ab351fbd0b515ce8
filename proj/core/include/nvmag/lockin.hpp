#pragma once

#include <span>
#include <vector>

#include "nvmag/odmr.hpp"

namespace nvmag {

/// Frequency-modulated microwave drive feeding a first-harmonic lock-in.
struct FmDriveConfig {
  double modulation_frequency = 33e3;  // Hz
  double peak_deviation = 250e3;       // Hz; 500 kHz peak-to-peak width
  bool three_tone_enabled = false;
  double three_tone_spacing = physics::kHyperfineSpacing;  // Hz
  double carrier_frequency = physics::kZeroFieldSplitting;  // Hz, operating point
  int integration_periods = 16;
  int samples_per_period = 64;  // must be even

  void validate() const;
};

struct DemodCurve {
  std::vector<double> carrier_grid;  // Hz, strictly increasing
  std::vector<double> demod_values;

  void validate() const;
};

/// First-harmonic lock-in output for a carrier: the fluorescence under FM
/// drive is multiplied by the reference sine and averaged over an integer
/// number of modulation periods. Normalized so that for small deviation the
/// value approaches peak_deviation * d(lineshape)/df.
double demod_response(const OdmrModel& model, const FmDriveConfig& drive, double carrier);

DemodCurve sweep_demod(const OdmrModel& model, const FmDriveConfig& drive,
                       std::span<const double> grid);

/// Grid frequency of maximum |d(demod)/d(carrier)|, i.e. maximum field
/// responsivity. Lowest frequency wins ties. Throws NoSetpointError when the
/// curve is flat.
double track_setpoint(const DemodCurve& curve);

/// d(demod)/d(carrier) at the drive's carrier, by central difference.
double demod_slope(const OdmrModel& model, const FmDriveConfig& drive);

/// Small-signal detector voltage at the tracked setpoint (drive.carrier_frequency):
///   v = slope * gamma * b * calibration
double field_to_voltage(const OdmrModel& model, const FmDriveConfig& drive,
                        double responsivity_calibration, double b);
double voltage_to_field(const OdmrModel& model, const FmDriveConfig& drive,
                        double responsivity_calibration, double volts);

/// Large-signal counterpart of field_to_voltage: the change in lock-in output
/// when the resonance is actually moved by the Zeeman shift of `b`.
double simulated_voltage(const OdmrModel& model, const FmDriveConfig& drive,
                         double responsivity_calibration, double b);

}  // namespace nvmag
