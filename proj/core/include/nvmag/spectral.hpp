#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nvmag/timeseries.hpp"

namespace nvmag {

/// One-sided amplitude spectral density, unit/sqrt(Hz).
struct Spectrum {
  std::vector<double> frequencies;  // Hz, bin k at k * sample_rate / segment_length
  std::vector<double> density;

  double resolution() const {
    return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
  }
  /// Index of the bin nearest to f on a uniform grid starting at frequencies[0].
  std::size_t bin_of(double f) const;
};

/// Welch estimate: periodic Hann window, 50% overlap, per-segment mean
/// removal, density scaling 2|X|^2 / (fs sum w^2) (no factor 2 at DC and
/// Nyquist), averaged over segments, square-rooted. Integrating the squared
/// density over frequency returns the record variance (Parseval).
/// Throws DomainError when segment_length is < 2 or exceeds the record.
Spectrum asd(const Timeseries& ts, std::size_t segment_length);

/// Integral of density^2 over all bins (rectangle rule).
double integrated_power(const Spectrum& s);

struct Band {
  double lo = 0.0;  // Hz, inclusive
  double hi = 0.0;  // Hz, inclusive
};

/// Median density over bins in `band`, skipping any bin within an excluded band.
double band_median(const Spectrum& s, Band band, std::span<const Band> excluded = {});

/// Rows: one per record, band-limited ASD normalized to its own maximum.
struct Spectrogram {
  std::vector<double> frequencies;
  std::vector<std::vector<double>> rows;
};

/// segment_length 0 means a single segment spanning each record.
Spectrogram spectrogram(std::span<const Timeseries> records, Band band,
                        std::size_t segment_length = 0);

/// Contiguous width (Hz) around the largest bin within `search` of f0 over
/// which the density stays at or above peak * 10^(level_db / 20).
double peak_width(const Spectrum& s, double f0, double search, double level_db = -20.0);
/// Largest density within +-search of f0.
double peak_density(const Spectrum& s, double f0, double search);

/// Least-squares sinusoid at a fixed frequency over the whole record.
struct ToneFit {
  double amplitude = 0.0;
  double phase = 0.0;  // rad, model amplitude * sin(2 pi f t + phase)
};
ToneFit fit_tone(const Timeseries& ts, double frequency);

/// Lag (samples, within +-max_lag) maximizing the cross-correlation
/// sum_i a[i] * b[i + lag].
std::ptrdiff_t xcorr_peak_lag(std::span<const double> a, std::span<const double> b,
                              std::size_t max_lag);

}  // namespace nvmag
