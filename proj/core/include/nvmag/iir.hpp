#pragma once

#include <span>
#include <vector>

namespace nvmag {

/// Normalized second-order section (a0 == 1), transposed direct form II.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
  /// Largest pole magnitude; < 1 for a stable section.
  double pole_radius() const;
  /// |H(e^{jw})| at frequency f for sample rate fs.
  double magnitude(double f, double fs) const;
};

/// Cascade of second-order sections.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const { return sections_; }
  double magnitude(double f, double fs) const;
  double pole_radius() const;

  /// Single causal pass from rest.
  std::vector<double> filter(std::span<const double> x) const;

  /// Forward-backward pass: squared magnitude response, zero phase.
  /// Both ends are extended by least-squares linear prediction for as long as the
  /// slowest pole needs to decay, so tones continue coherently into the
  /// padding and the start-up transient never reaches the record.
  std::vector<double> filtfilt(std::span<const double> x) const;

 private:
  std::vector<Biquad> sections_;
};

namespace design {

/// Butterworth lowpass / highpass of the given order (bilinear, prewarped).
SosFilter butterworth_lowpass(int order, double cutoff, double sample_rate);
SosFilter butterworth_highpass(int order, double cutoff, double sample_rate);
/// Second-order notch with -3 dB bandwidth `bandwidth` Hz around `center`.
SosFilter notch(double center, double bandwidth, double sample_rate);

}  // namespace design

}  // namespace nvmag
