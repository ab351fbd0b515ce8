#include "nvmag/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "nvmag/errors.hpp"

namespace nvmag {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Stream : std::uint32_t { walk = 1, white = 2, laser = 3, reference = 4 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(stream),
                    index};
  return std::mt19937_64(seq);
}

void check_record(double sample_rate, double duration) {
  if (!(sample_rate > 0.0) || !(duration > 0.0))
    throw DomainError("synth: sample_rate and duration must be > 0");
  if (sample_count(sample_rate, duration) < 2)
    throw DomainError("synth: record must hold at least two samples");
}

}  // namespace

void NoiseEnvironment::validate() const {
  if (!(mains_fundamental > 0.0)) throw DomainError("environment: mains_fundamental must be > 0");
  for (const auto& [k, a] : harmonic_amplitudes) {
    if (k < 1) throw DomainError("environment: harmonic index must be >= 1");
    if (!(a >= 0.0)) throw DomainError("environment: harmonic amplitude must be >= 0");
  }
  if (!(phase_walk_sigma >= 0.0)) throw DomainError("environment: phase_walk_sigma must be >= 0");
  if (!(laser_drift_amplitude >= 0.0))
    throw DomainError("environment: laser_drift_amplitude must be >= 0");
  if (!(white_floor >= 0.0)) throw DomainError("environment: white_floor must be >= 0");
  if (!(reference_noise >= 0.0)) throw DomainError("environment: reference_noise must be >= 0");
}

void TestSignal::validate() const {
  if (!(amplitude >= 0.0)) throw DomainError("test signal: amplitude must be >= 0");
  if (kind == Kind::tone) {
    if (!(frequency > 0.0)) throw DomainError("test signal: tone frequency must be > 0");
  } else {
    if (!(pulse_width > 0.0)) throw DomainError("test signal: pulse_width must be > 0");
    if (!(repetition_rate > 0.0)) throw DomainError("test signal: repetition_rate must be > 0");
    if (pulse_width * repetition_rate > 1.0)
      throw DomainError("test signal: pulses overlap (pulse_width > 1 / repetition_rate)");
  }
}

std::vector<double> mains_phase_walk(const NoiseEnvironment& env, double sample_rate,
                                     double duration, int harmonic) {
  env.validate();
  check_record(sample_rate, duration);
  const std::size_t n = sample_count(sample_rate, duration);
  std::vector<double> phase(n, 0.0);
  if (env.phase_walk_sigma == 0.0) return phase;
  auto rng = make_engine(env.rng_seed, Stream::walk, static_cast<std::uint32_t>(harmonic));
  std::normal_distribution<double> step(0.0, env.phase_walk_sigma / std::sqrt(sample_rate));
  for (std::size_t i = 1; i < n; ++i) phase[i] = phase[i - 1] + step(rng);
  return phase;
}

Timeseries gen_mains(const NoiseEnvironment& env, double sample_rate, double duration) {
  env.validate();
  check_record(sample_rate, duration);
  Timeseries out = Timeseries::zeros(sample_rate, duration, Unit::tesla);
  for (const auto& [k, amplitude] : env.harmonic_amplitudes) {
    if (amplitude == 0.0) continue;
    const auto walk = mains_phase_walk(env, sample_rate, duration, k);
    const double w = kTwoPi * k * env.mains_fundamental;
    for (std::size_t i = 0; i < out.size(); ++i)
      out.samples[i] += amplitude * std::sin(w * out.time(i) + walk[i]);
  }
  return out;
}

Timeseries gen_mains_reference(const NoiseEnvironment& env, double sample_rate, double duration) {
  env.validate();
  check_record(sample_rate, duration);
  const auto walk = mains_phase_walk(env, sample_rate, duration, 1);
  Timeseries out = Timeseries::zeros(sample_rate, duration, Unit::volts);
  const double w = kTwoPi * env.mains_fundamental;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] = std::sin(w * out.time(i) + walk[i]);
  if (env.reference_noise > 0.0) {
    auto rng = make_engine(env.rng_seed, Stream::reference);
    std::normal_distribution<double> noise(0.0, env.reference_noise);
    for (double& v : out.samples) v += noise(rng);
  }
  return out;
}

Timeseries gen_white(double floor, double sample_rate, double duration, std::uint64_t seed) {
  if (!(floor >= 0.0)) throw DomainError("gen_white: floor must be >= 0");
  check_record(sample_rate, duration);
  Timeseries out = Timeseries::zeros(sample_rate, duration, Unit::tesla);
  if (floor == 0.0) return out;
  auto rng = make_engine(seed, Stream::white);
  std::normal_distribution<double> noise(0.0, floor * std::sqrt(0.5 * sample_rate));
  for (double& v : out.samples) v = noise(rng);
  return out;
}

Timeseries gen_laser_drift(const NoiseEnvironment& env, double sample_rate, double duration) {
  env.validate();
  check_record(sample_rate, duration);
  Timeseries out = Timeseries::zeros(sample_rate, duration, Unit::tesla);
  if (env.laser_drift_amplitude == 0.0) return out;

  const std::size_t n = out.size();
  const std::size_t bins = n / 2 + 1;
  auto rng = make_engine(env.rng_seed, Stream::laser);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // One-sided PSD S(f)^2 realized by E|X_k|^2 = S^2 fs n / 2 for the
  // unnormalized DFT, split evenly over real and imaginary parts.
  std::vector<std::complex<double>> spectrum(bins);
  const double scale = std::sqrt(sample_rate * static_cast<double>(n) / 4.0);
  for (std::size_t k = 1; k < bins; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    const double asd = env.laser_drift_amplitude / f;
    const double re = gauss(rng), im = gauss(rng);
    spectrum[k] = {re * asd * scale, im * asd * scale};
  }
  if (n % 2 == 0) spectrum[bins - 1] = 0.0;

  out.samples = detail::inverse_real(std::move(spectrum), n);
  for (double& v : out.samples) v /= static_cast<double>(n);
  return out;
}

Timeseries gen_test_signal(const TestSignal& sig, double sample_rate, double duration) {
  sig.validate();
  check_record(sample_rate, duration);
  Timeseries out = Timeseries::zeros(sample_rate, duration, Unit::tesla);
  if (sig.amplitude == 0.0) return out;

  if (sig.kind == TestSignal::Kind::tone) {
    const double w = kTwoPi * sig.frequency;
    for (std::size_t i = 0; i < out.size(); ++i)
      out.samples[i] = sig.amplitude * std::sin(w * out.time(i));
    return out;
  }

  // Gaussian-windowed single sine cycle spanning pulse_width, centred on a
  // sample so the waveform is exactly odd about its centre.
  const auto half = static_cast<std::ptrdiff_t>(std::floor(0.5 * sig.pulse_width * sample_rate));
  const double sigma = sig.pulse_width / 6.0;
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  for (int m = 0;; ++m) {
    const double t_centre = (m + 0.5) / sig.repetition_rate;
    const auto c = static_cast<std::ptrdiff_t>(std::llround(t_centre * sample_rate));
    if (c + half >= n) break;
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
      const double tau = static_cast<double>(j) / sample_rate;
      out.samples[static_cast<std::size_t>(c + j)] +=
          sig.amplitude * std::sin(kTwoPi * tau / sig.pulse_width) *
          std::exp(-0.5 * (tau / sigma) * (tau / sigma));
    }
  }
  return out;
}

Timeseries compose(std::span<const Timeseries> parts) {
  if (parts.empty()) throw CompositionError("compose: no records");
  Timeseries out = parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const Timeseries& x = parts[p];
    if (x.sample_rate != out.sample_rate) throw CompositionError("compose: sample rates differ");
    if (x.unit != out.unit) throw CompositionError("compose: units differ");
    if (x.size() != out.size()) throw CompositionError("compose: lengths differ");
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += x.samples[i];
  }
  return out;
}

Timeseries average(std::span<const Timeseries> parts) {
  Timeseries out = compose(parts);
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (double& v : out.samples) v *= inv;
  return out;
}

Timeseries gen_environment(const NoiseEnvironment& env, double sample_rate, double duration) {
  const Timeseries parts[] = {gen_mains(env, sample_rate, duration),
                              gen_laser_drift(env, sample_rate, duration),
                              gen_white(env.white_floor, sample_rate, duration, env.rng_seed)};
  return compose(parts);
}

}  // namespace nvmag
