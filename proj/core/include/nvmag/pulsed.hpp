#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace nvmag {

/// Initialisation / MW / readout timing of one measurement cycle.
struct PulseSequence {
  double init_duration = 100e-3;   // s
  double mw_duration = 680e-9;     // s
  double readout_duration = 4e-3;  // s
  int n_readouts_per_cycle = 2;    // 1, 2 (on/off) or 3 (common-mode)

  void validate() const;
};

/// Readout-difference amplitude and power-dependent reinitialisation time.
struct PulsedReadoutModel {
  double delta_v0 = 0.05;  // V
  /// laser power (W) -> decay time (s); linearly interpolated between entries
  std::map<double, double> decay_time_at_powers{{20e-3, 1.0e-3}, {218e-3, 0.75e-3}};
  double intensity = 1.5e3;  // W/cm^2 at the reference power

  void validate() const;
};

struct RabiModel {
  double pi_time = 680e-9;                                     // s
  double rabi_decay = std::numeric_limits<double>::infinity();  // s

  void validate() const;
};

struct DecayTime {
  double seconds = 0.0;
  bool clamped = false;  // requested power outside the configured map
};

DecayTime decay_time(const PulsedReadoutModel& model, double power);

struct ReadoutDifference {
  double volts = 0.0;
  double decay_time = 0.0;
  bool clamped = false;
};

/// dV(t) = dV0 exp(-t / tau_d(power)).
ReadoutDifference readout_difference(const PulsedReadoutModel& model, double t, double power);

struct ExponentialFit {
  double amplitude = 0.0;
  double decay_time = 0.0;  // s
  double amplitude_error = 0.0;
  double decay_time_error = 0.0;
};

/// Least-squares A exp(-t / tau). Errors are the largest parameter change
/// when every value is shifted by +noise_std or -noise_std and refitted.
/// Throws DomainError for fewer than 8 samples or mismatched lengths,
/// FitError for non-decaying data or a record spanning under two decay times.
ExponentialFit fit_exponential(std::span<const double> times, std::span<const double> values,
                               double noise_std);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares. Throws DomainError for < 2 points or constant x.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

/// sin^2(pi tau / (2 pi_time)) exp(-tau / rabi_decay).
double rabi_contrast(const RabiModel& rabi, double tau);

/// Pulse length maximizing rabi_contrast: scan [0, scan_range] at
/// `resolution`, then parabolic refinement. scan_range must reach 2 pi_time.
double optimal_pi_time(const RabiModel& rabi, double scan_range, double resolution = 1e-9);

inline constexpr double kDefaultCycleTimePerReadout = 4e-3;  // s

/// 1 / (n_readouts * cycle_time_per_readout).
double sensing_bandwidth(int n_readouts, double cycle_time_per_readout = kDefaultCycleTimePerReadout);

/// Synthetic MW-on minus MW-off readout trace averaged over `repetitions`
/// cycles, sampled at `sample_rate` for the readout duration. Per-cycle
/// Gaussian noise of `noise_std` volts. The amplitude is scaled by the Rabi
/// contrast of the sequence's MW pulse relative to a perfect pi pulse.
struct ReadoutTrace {
  std::vector<double> times;
  std::vector<double> values;
};
ReadoutTrace simulate_readout_trace(const PulsedReadoutModel& model, const PulseSequence& seq,
                                    const RabiModel& rabi, double power, double sample_rate,
                                    double noise_std, int repetitions, std::uint64_t seed);

}  // namespace nvmag
