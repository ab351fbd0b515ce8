#pragma once

#include <cstddef>
#include <vector>

namespace nvmag {

namespace physics {
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kZeroFieldSplitting = 2.87e9;  // Hz
inline constexpr double kNvGyromagnetic = 28e9;        // Hz/T
inline constexpr double kHyperfineSpacing = 2.16e6;    // Hz, 14N
}  // namespace physics

/// Parametric NV-ensemble ODMR response: a set of identical Lorentzian dips
/// placed symmetrically about the resonance center.
///
/// The resonance center is `center_frequency` shifted by the Zeeman response
/// to `bias_field_parallel`. Use validate() before evaluating; all free
/// functions below call it.
struct OdmrModel {
  double center_frequency = physics::kZeroFieldSplitting;  // Hz
  double fwhm = 1e6;                                       // Hz
  double contrast_per_line = 0.01 / 3.0;
  int n_hyperfine_lines = 3;
  double hyperfine_spacing = physics::kHyperfineSpacing;  // Hz
  double gyromagnetic_response = physics::kNvGyromagnetic;  // Hz/T
  double bias_field_parallel = 0.0;                          // T

  /// Throws DomainError. A contrast of exactly zero is accepted so that flat
  /// reference models can be swept; operations needing a slope reject it.
  void validate() const;

  double resonance_center() const;
  double total_contrast() const { return contrast_per_line * n_hyperfine_lines; }
  std::vector<double> line_centers() const;

  /// Copy with the resonance moved by `delta_hz` (thermal drift, applied field).
  OdmrModel shifted(double delta_hz) const;
  /// Single line carrying the summed contrast of all hyperfine lines.
  OdmrModel collapsed() const;
};

/// Detected fluorescence converted to a photon rate at a mean wavelength.
struct PhotonBudget {
  double detected_optical_power = 5e-3;  // W
  double mean_photon_wavelength = 700e-9;  // m

  double detection_rate() const;  // photons/s
};

/// Relative fluorescence in (0, 1].
double lineshape(const OdmrModel& model, double frequency);
/// d(lineshape)/df in 1/Hz.
double lineshape_slope(const OdmrModel& model, double frequency);

double zeeman_shift(const OdmrModel& model, double b_parallel);

struct Setpoint {
  double frequency = 0.0;  // Hz
  double slope = 0.0;      // 1/Hz, signed
};

/// Frequency of steepest lineshape slope. Scans the dip region at
/// fwhm/`resolution_divisor` steps, then refines parabolically. Ties resolve
/// to the lowest frequency. Throws NoSetpointError for a flat model.
Setpoint max_slope_setpoint(const OdmrModel& model, double resolution_divisor = 1000.0);

/// Shot-noise-limited CW sensitivity in T/sqrt(Hz):
///   4/(3 sqrt 3) * fwhm / (gamma * C_total * sqrt(R))
double cw_shot_noise_sensitivity(const OdmrModel& model, const PhotonBudget& budget);
/// Same formula with the photon rate given directly.
double cw_shot_noise_sensitivity(const OdmrModel& model, double detection_rate);

/// Noise-amplitude reduction from averaging n repeats: sqrt(n).
double averaging_gain(std::size_t n);

}  // namespace nvmag
