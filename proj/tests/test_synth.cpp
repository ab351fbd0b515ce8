#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nvmag/errors.hpp"
#include "nvmag/spectral.hpp"
#include "nvmag/synth.hpp"
#include "support.hpp"

using namespace nvmag;

namespace {

NoiseEnvironment mains_only(double sigma, std::uint64_t seed) {
  NoiseEnvironment env;
  env.harmonic_amplitudes = {{1, 3e-7}};
  env.phase_walk_sigma = sigma;
  env.rng_seed = seed;
  return env;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= a.size(), mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("zero amplitudes give an all-zero record") {
  NoiseEnvironment env;
  env.phase_walk_sigma = 0.3;
  env.rng_seed = 4;
  const Timeseries x = gen_mains(env, 1000.0, 2.0);
  CHECK(x.size() == 2000);
  CHECK(std::all_of(x.samples.begin(), x.samples.end(), [](double v) { return v == 0.0; }));
  CHECK(gen_white(0.0, 1000.0, 1.0, 3).samples == std::vector<double>(1000, 0.0));
  TestSignal s;
  CHECK(gen_test_signal(s, 1000.0, 1.0).samples == std::vector<double>(1000, 0.0));
}

TEST_CASE("identical seed and config reproduce records bit for bit") {
  NoiseEnvironment env = mains_only(0.2, 99);
  env.harmonic_amplitudes[3] = 1e-7;
  env.white_floor = 1.5e-10;
  env.laser_drift_amplitude = 1e-9;
  const Timeseries a = gen_environment(env, 2000.0, 4.0), b = gen_environment(env, 2000.0, 4.0);
  CHECK(a.samples == b.samples);
  env.rng_seed = 100;
  CHECK(gen_environment(env, 2000.0, 4.0).samples != a.samples);
}

TEST_CASE("without phase walk a 50 Hz tone stays within one bin of its FFT line") {
  const double fs = 1000.0, duration = 60.0;
  const Spectrum s = asd(gen_mains(mains_only(0.0, 1), fs, duration), static_cast<std::size_t>(fs * duration));
  const std::size_t k = s.bin_of(50.0);
  const double peak = s.density[k];
  for (std::size_t i = 0; i < s.density.size(); ++i)
    if (i + 1 < k || i > k + 1) CHECK(s.density[i] < 1e-6 * peak);
}

TEST_CASE("phase walk broadens the 50 Hz line") {
  const double fs = 1000.0, duration = 60.0;
  const auto n = static_cast<std::size_t>(fs * duration);
  const double still = peak_width(asd(gen_mains(mains_only(0.0, 1), fs, duration), n), 50.0, 2.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const double walked = peak_width(asd(gen_mains(mains_only(0.3, seed), fs, duration), n), 50.0, 2.0);
    CHECK(walked > still);
  }
}

TEST_CASE("phase walk increments have std sigma / sqrt(fs)") {
  const NoiseEnvironment env = mains_only(0.3, 5);
  const double fs = 2000.0;
  const auto walk = mains_phase_walk(env, fs, 50.0, 1);
  CHECK(walk.front() == 0.0);
  std::vector<double> steps;
  for (std::size_t i = 1; i < walk.size(); ++i) steps.push_back(walk[i] - walk[i - 1]);
  CHECK(std::sqrt(testing::variance(steps)) == doctest::Approx(0.3 / std::sqrt(fs)).epsilon(0.02));
  // harmonics walk independently
  const auto walk3 = mains_phase_walk(env, fs, 50.0, 3);
  CHECK(walk3 != walk);
}

TEST_CASE("white floor: variance and band-median density") {
  const double floor = 150e-12, fs = 25000.0;
  const Timeseries w = gen_white(floor, fs, 60.0, 8);
  CHECK(testing::variance(w.samples) == doctest::Approx(floor * floor * fs / 2.0).epsilon(0.05));
  const Spectrum s = asd(w, 25000);
  CHECK(band_median(s, {1.0, 12000.0}) == doctest::Approx(floor).epsilon(0.10));
}

TEST_CASE("111 Hz tone amplitude from a Hann-windowed DFT") {
  TestSignal s;
  s.amplitude = 1e-9;
  const Timeseries x = gen_test_signal(s, 25000.0, 60.0);
  CHECK(testing::hann_tone_amplitude(x.samples, 25000.0, 111.0) == doctest::Approx(1e-9).epsilon(1e-9));
  CHECK(x.samples[0] == 0.0);
}

TEST_CASE("biopulses integrate to zero") {
  TestSignal s;
  s.kind = TestSignal::Kind::biopulse;
  s.amplitude = 2e-9;
  s.pulse_width = 5e-3;
  s.repetition_rate = 10.0;
  const double fs = 25000.0;
  const Timeseries x = gen_test_signal(s, fs, 1.0);
  const auto period = static_cast<std::size_t>(fs / s.repetition_rate);
  for (std::size_t p = 0; p + period <= x.size(); p += period) {
    double sum = 0.0, l1 = 0.0;
    for (std::size_t i = p; i < p + period; ++i) sum += x.samples[i], l1 += std::abs(x.samples[i]);
    CHECK(l1 > 0.0);
    CHECK(std::abs(sum) <= 1e-12 * l1);
  }
  CHECK(*std::max_element(x.samples.begin(), x.samples.end()) <= s.amplitude);
}

TEST_CASE("compose: identity, zero padding and mismatch errors") {
  const Timeseries x = gen_white(1e-10, 1000.0, 1.0, 1);
  const Timeseries parts1[] = {x};
  CHECK(compose(parts1).samples == x.samples);
  const Timeseries parts2[] = {x, Timeseries::zeros(1000.0, 1.0)};
  CHECK(compose(parts2).samples == x.samples);

  const Timeseries other_rate[] = {x, Timeseries::zeros(500.0, 2.0)};
  CHECK_THROWS_AS(compose(other_rate), CompositionError);
  const Timeseries other_len[] = {x, Timeseries::zeros(1000.0, 2.0)};
  CHECK_THROWS_AS(compose(other_len), CompositionError);
  const Timeseries other_unit[] = {x, Timeseries::zeros(1000.0, 1.0, Unit::volts)};
  CHECK_THROWS_AS(compose(other_unit), CompositionError);
  CHECK_THROWS_AS(compose(std::span<const Timeseries>{}), CompositionError);
}

TEST_CASE("compose is linear") {
  testing::Rng rng(31);
  const Timeseries x = gen_white(1e-10, 1000.0, 1.0, 2), y = gen_white(3e-10, 1000.0, 1.0, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    const Timeseries parts[] = {scaled(x, a), scaled(y, b)};
    const Timeseries z = compose(parts);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z.samples[i] == a * x.samples[i] + b * y.samples[i]);
  }
}

TEST_CASE("independent white records add in quadrature") {
  const double fs = 10000.0;
  const Timeseries parts[] = {gen_white(100e-12, fs, 30.0, 41), gen_white(200e-12, fs, 30.0, 42)};
  const Spectrum s = asd(compose(parts), 10000);
  CHECK(band_median(s, {1.0, 4900.0}) == doctest::Approx(std::hypot(100e-12, 200e-12)).epsilon(0.10));
}

TEST_CASE("reference shares the fundamental's walk") {
  NoiseEnvironment env = mains_only(0.3, 12);
  env.harmonic_amplitudes[3] = 2e-7;
  const double fs = 2000.0;
  const Timeseries ref = gen_mains_reference(env, fs, 10.0);
  NoiseEnvironment fundamental = env;
  fundamental.harmonic_amplitudes = {{1, 3e-7}};
  const Timeseries m = gen_mains(fundamental, fs, 10.0);
  CHECK(pearson(ref.samples, m.samples) >= 0.99);
  for (std::size_t i = 0; i < ref.size(); i += 97) CHECK(ref.samples[i] * 3e-7 == doctest::Approx(m.samples[i]).epsilon(1e-12).scale(1e-9));

  const Timeseries pure = gen_mains_reference(mains_only(0.0, 12), fs, 1.0);
  for (std::size_t i = 0; i < pure.size(); ++i)
    CHECK(pure.samples[i] == doctest::Approx(std::sin(2.0 * std::numbers::pi * 50.0 * pure.time(i))).scale(1.0));
  CHECK(pure.unit == Unit::volts);
}

TEST_CASE("laser drift falls off as 1/f between 1 and 100 Hz") {
  NoiseEnvironment env;
  env.laser_drift_amplitude = 1e-9;
  env.rng_seed = 77;
  const double fs = 1000.0;
  const Spectrum s = asd(gen_laser_drift(env, fs, 120.0), 20000);
  std::vector<double> octave;
  for (double lo = 1.0; lo < 100.0; lo *= 2.0) {
    double acc = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < s.frequencies.size(); ++k)
      if (s.frequencies[k] >= lo && s.frequencies[k] < 2.0 * lo) acc += s.density[k] * s.density[k], ++n;
    octave.push_back(std::sqrt(acc / n));
  }
  CHECK(octave.front() == doctest::Approx(1e-9 / std::sqrt(2.0)).epsilon(0.3));
  for (std::size_t i = 1; i < octave.size(); ++i) {
    const double step_db = 20.0 * std::log10(octave[i] / octave[i - 1]);
    CHECK(step_db < 0.0);
    CHECK(std::abs(step_db + 6.02) <= 3.0);
  }
}

TEST_CASE("environment validation") {
  NoiseEnvironment env;
  env.white_floor = -1.0;
  CHECK_THROWS_AS(env.validate(), DomainError);
  env = NoiseEnvironment{};
  env.harmonic_amplitudes = {{1, -1.0}};
  CHECK_THROWS_AS(env.validate(), DomainError);
  TestSignal s;
  s.frequency = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

}  // TEST_SUITE
