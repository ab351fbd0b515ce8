#pragma once

#include <vector>

#include "nvmag/timeseries.hpp"

namespace nvmag {

enum class FilterKind { highpass, lowpass, notch };

struct FilterParams {
  double frequency = 0.0;   // cutoff or notch center, Hz
  double bandwidth = 1.0;   // notch -3 dB width, Hz
  int order = 2;            // Butterworth order per pass (highpass/lowpass)
};

/// Forward-backward IIR filtering: zero group delay, same length as input.
Timeseries zero_phase_filter(const Timeseries& ts, FilterKind kind, const FilterParams& params);

struct FilterChainConfig {
  double mains_fundamental = 50.0;  // Hz; frequency tracked on the reference
  double highpass_cutoff = 10.0;
  int highpass_order = 2;
  std::vector<double> tracked_harmonics{50.0, 150.0, 250.0};
  double tracking_window = 1.0;      // s
  std::vector<double> phase_offsets;     // rad per tracked harmonic; missing entries are 0
  std::vector<int> subtraction_passes;   // per tracked harmonic; missing entries are 1
  std::vector<double> notch_centers{50.0, 150.0, 250.0};
  double notch_bandwidth = 1.0;
  double lowpass_cutoff = 5000.0;
  int lowpass_order = 2;

  double phase_offset(std::size_t harmonic) const;
  int passes(std::size_t harmonic) const;
  /// Throws DomainError naming the offending field.
  void validate(double sample_rate) const;
};

/// Tracked phase of a sinusoid, one estimate per analysis window.
/// Windows are `window` seconds long with 50% overlap; the last window is
/// aligned to the record end.
struct PhaseSeries {
  std::vector<double> times;       // s, window centres
  std::vector<double> phases;      // rad, unwrapped
  std::vector<double> amplitudes;  // fitted sinusoid amplitude per window
  double window = 0.0;             // s

  /// Linear interpolation between window centres, held constant outside.
  double phase_at(double t) const;
};

/// Per window, least-squares fit of a sin(2 pi f t) + b cos(2 pi f t) to the
/// reference; phase = atan2(b, a), unwrapped across windows.
/// Throws DomainError if the window spans fewer than 10 cycles or the record
/// is shorter than two windows.
PhaseSeries estimate_phase_drift(const Timeseries& reference, double frequency, double window);

/// Phase of harmonic k derived from the fundamental: k * phi_1 + offset.
PhaseSeries harmonic_phase(const PhaseSeries& fundamental, int k, double offset);

/// Removes the component tracking sin(2 pi f t + phi(t) + pass * pi/2).
/// Each pass fits one amplitude per window of `phase`, cross-fades amplitudes
/// linearly between window centres and subtracts. Pass p uses the template
/// shifted by p * pi/2, so two passes cancel any constant-phase mix of
/// same-frequency sources.
Timeseries coherent_subtract(const Timeseries& ts, const PhaseSeries& phase, double frequency,
                             int passes = 1);

struct PipelineStages {
  Timeseries highpassed;
  Timeseries subtracted;
  Timeseries notched;
  Timeseries output;
};

/// highpass -> per-harmonic tracking and coherent subtraction -> notch bank -> lowpass.
PipelineStages run_pipeline_stages(const Timeseries& ts, const Timeseries& reference,
                                   const FilterChainConfig& cfg);
Timeseries run_pipeline(const Timeseries& ts, const Timeseries& reference,
                        const FilterChainConfig& cfg);

}  // namespace nvmag
