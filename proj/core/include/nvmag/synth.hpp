#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "nvmag/timeseries.hpp"

namespace nvmag {

/// Interference and noise sources seen by a magnetometer in an unshielded lab.
///
/// Each mains harmonic k carries amplitude A_k and its own Gaussian phase
/// random walk (per-sample std phase_walk_sigma / sqrt(sample_rate)), all
/// walks starting at zero. Laser drift has a 1/f amplitude spectral density
/// equal to laser_drift_amplitude at 1 Hz. Every stochastic part draws from
/// its own stream derived from rng_seed, so records are reproducible
/// bit-for-bit and independent of which other parts are enabled.
struct NoiseEnvironment {
  double mains_fundamental = 50.0;              // Hz
  std::map<int, double> harmonic_amplitudes;    // harmonic index -> T
  double phase_walk_sigma = 0.0;                // rad / sqrt(s)
  double laser_drift_amplitude = 0.0;           // T/sqrt(Hz) at 1 Hz
  double white_floor = 0.0;                     // T/sqrt(Hz)
  double reference_noise = 0.0;                 // std of white noise on the reference, unitless
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct TestSignal {
  enum class Kind { tone, biopulse };
  Kind kind = Kind::tone;
  double frequency = 111.0;       // Hz (tone)
  double amplitude = 0.0;         // T
  double pulse_width = 5e-3;      // s (biopulse)
  double repetition_rate = 10.0;  // Hz (biopulse)

  void validate() const;
};

/// Phase walk of mains harmonic `harmonic` (radians, one value per sample).
std::vector<double> mains_phase_walk(const NoiseEnvironment& env, double sample_rate,
                                     double duration, int harmonic);

Timeseries gen_mains(const NoiseEnvironment& env, double sample_rate, double duration);

/// Unit-amplitude fundamental sharing the harmonic-1 walk of gen_mains, plus
/// optional independent white noise of std env.reference_noise. Unit: volts.
Timeseries gen_mains_reference(const NoiseEnvironment& env, double sample_rate, double duration);

/// White Gaussian noise with flat one-sided ASD `floor`
/// (per-sample std floor * sqrt(sample_rate / 2)).
Timeseries gen_white(double floor, double sample_rate, double duration, std::uint64_t seed);

/// 1/f-amplitude drift by spectral synthesis; zero mean, no DC.
Timeseries gen_laser_drift(const NoiseEnvironment& env, double sample_rate, double duration);

Timeseries gen_test_signal(const TestSignal& sig, double sample_rate, double duration);

/// Pointwise sum. Throws CompositionError on empty input or mismatched
/// rate, unit or length.
Timeseries compose(std::span<const Timeseries> parts);
/// Pointwise mean of repeated records (same checks as compose).
Timeseries average(std::span<const Timeseries> parts);

/// mains + laser drift + white floor, all from env.
Timeseries gen_environment(const NoiseEnvironment& env, double sample_rate, double duration);

}  // namespace nvmag
