#pragma once

// Test-only helpers: a small seeded generator for property tests and
// reference implementations written independently of the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace testing {

// SplitMix64 with Box-Muller normals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  std::uint64_t state_;
};

// Sum of n equal Lorentzian dips centred symmetrically on `center`.
inline double lorentz_dips(double f, double center, double fwhm, double contrast, int n, double spacing) {
  double v = 1.0;
  for (int k = 0; k < n; ++k) {
    const double fk = center + (k - 0.5 * (n - 1)) * spacing;
    const double u = (f - fk) / (0.5 * fwhm);
    v -= contrast / (1.0 + u * u);
  }
  return v;
}

// Amplitude of a sinusoid at `f` from a Hann-windowed single-bin DFT,
// corrected by the window's coherent gain.
inline double hann_tone_amplitude(const std::vector<double>& x, double fs, double f) {
  const std::size_t n = x.size();
  std::complex<double> acc = 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    wsum += w;
    acc += w * x[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  }
  return 2.0 * std::abs(acc) / wsum;
}

inline double variance(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Deterministic test waveform shared with the frozen scipy reference values.
inline std::vector<double> chirp_mix(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k);
    x[k] = std::sin(0.3 * i) + 0.2 * std::sin(1e-4 * i * i) + 0.05 * static_cast<double>((k * 7919) % 101) / 101.0;
  }
  return x;
}

}  // namespace testing
