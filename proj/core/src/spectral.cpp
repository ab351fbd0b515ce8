#include "nvmag/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "nvmag/errors.hpp"

namespace nvmag {

std::size_t Spectrum::bin_of(double f) const {
  if (frequencies.empty()) throw DomainError("spectrum: empty");
  const double df = resolution();
  if (df <= 0.0) return 0;
  const auto k = static_cast<std::ptrdiff_t>(std::llround((f - frequencies.front()) / df));
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(frequencies.size()) - 1));
}

Spectrum asd(const Timeseries& ts, std::size_t segment_length) {
  ts.validate();
  const std::size_t n = ts.size();
  if (segment_length < 2 || segment_length > n)
    throw DomainError("asd: segment_length must lie in [2, record length]");

  const std::size_t len = segment_length;
  const std::size_t hop = std::max<std::size_t>(1, len / 2);
  std::vector<double> window(len);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double w = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
    window[i] = w * w;
    wsum2 += window[i] * window[i];
  }

  detail::RealFft fft(len);
  const std::size_t bins = fft.bins();
  std::vector<double> power(bins, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + len <= n; start += hop, ++segments) {
    const auto seg = std::span(ts.samples).subspan(start, len);
    double m = 0.0;
    for (double v : seg) m += v;
    m /= static_cast<double>(len);
    auto in = fft.input();
    for (std::size_t i = 0; i < len; ++i) in[i] = (seg[i] - m) * window[i];
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) power[k] += std::norm(fft.bin(k));
  }

  Spectrum out;
  out.frequencies.resize(bins);
  out.density.resize(bins);
  const double norm = 1.0 / (ts.sample_rate * wsum2 * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = (k == 0) || (len % 2 == 0 && k == bins - 1);
    out.frequencies[k] = static_cast<double>(k) * ts.sample_rate / static_cast<double>(len);
    out.density[k] = std::sqrt((edge ? 1.0 : 2.0) * power[k] * norm);
  }
  return out;
}

double integrated_power(const Spectrum& s) {
  double acc = 0.0;
  for (double d : s.density) acc += d * d;
  return acc * s.resolution();
}

double band_median(const Spectrum& s, Band band, std::span<const Band> excluded) {
  std::vector<double> picked;
  for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
    const double f = s.frequencies[k];
    if (f < band.lo || f > band.hi) continue;
    const bool skip = std::any_of(excluded.begin(), excluded.end(),
                                  [f](const Band& b) { return f >= b.lo && f <= b.hi; });
    if (!skip) picked.push_back(s.density[k]);
  }
  if (picked.empty()) throw DomainError("band_median: no bins in band");
  const auto mid = picked.begin() + static_cast<std::ptrdiff_t>(picked.size() / 2);
  std::nth_element(picked.begin(), mid, picked.end());
  if (picked.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(picked.begin(), mid);
  return 0.5 * (lower + upper);
}

Spectrogram spectrogram(std::span<const Timeseries> records, Band band, std::size_t segment_length) {
  Spectrogram out;
  if (records.empty()) return out;
  const double rate = records.front().sample_rate;
  for (const auto& r : records) {
    if (r.sample_rate != rate) throw DomainError("spectrogram: records differ in sample rate");
    const Spectrum s = asd(r, segment_length == 0 ? r.size() : segment_length);
    std::vector<double> freqs, row;
    for (std::size_t k = 0; k < s.frequencies.size(); ++k) {
      if (s.frequencies[k] < band.lo || s.frequencies[k] > band.hi) continue;
      freqs.push_back(s.frequencies[k]);
      row.push_back(s.density[k]);
    }
    if (out.rows.empty()) {
      out.frequencies = freqs;
    } else if (freqs.size() != out.frequencies.size()) {
      throw DomainError("spectrogram: records produce different frequency grids");
    }
    const double peak = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    if (peak > 0.0)
      for (double& v : row) v /= peak;
    out.rows.push_back(std::move(row));
  }
  return out;
}

double peak_density(const Spectrum& s, double f0, double search) {
  const std::size_t lo = s.bin_of(f0 - search), hi = s.bin_of(f0 + search);
  double best = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) best = std::max(best, s.density[k]);
  return best;
}

double peak_width(const Spectrum& s, double f0, double search, double level_db) {
  const std::size_t lo = s.bin_of(f0 - search), hi = s.bin_of(f0 + search);
  std::size_t peak = lo;
  for (std::size_t k = lo; k <= hi; ++k)
    if (s.density[k] > s.density[peak]) peak = k;
  const double threshold = s.density[peak] * std::pow(10.0, level_db / 20.0);
  std::size_t left = peak, right = peak;
  while (left > 0 && s.density[left - 1] >= threshold) --left;
  while (right + 1 < s.density.size() && s.density[right + 1] >= threshold) ++right;
  return static_cast<double>(right - left + 1) * s.resolution();
}

ToneFit fit_tone(const Timeseries& ts, double frequency) {
  ts.validate();
  const double w = 2.0 * std::numbers::pi * frequency;
  double ss = 0.0, cc = 0.0, sc = 0.0, xs = 0.0, xc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double s = std::sin(w * ts.time(i)), c = std::cos(w * ts.time(i));
    ss += s * s;
    cc += c * c;
    sc += s * c;
    xs += ts.samples[i] * s;
    xc += ts.samples[i] * c;
  }
  const double det = ss * cc - sc * sc;
  if (!(std::abs(det) > 0.0)) throw DomainError("fit_tone: degenerate record for this frequency");
  const double a = (xs * cc - xc * sc) / det;  // sin coefficient
  const double b = (xc * ss - xs * sc) / det;  // cos coefficient
  return {std::hypot(a, b), std::atan2(b, a)};
}

std::ptrdiff_t xcorr_peak_lag(std::span<const double> a, std::span<const double> b,
                              std::size_t max_lag) {
  const auto n = static_cast<std::ptrdiff_t>(std::min(a.size(), b.size()));
  const auto lag_limit = static_cast<std::ptrdiff_t>(max_lag);
  std::ptrdiff_t best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t lag = -lag_limit; lag <= lag_limit; ++lag) {
    double acc = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -lag); i < n && i + lag < n; ++i)
      acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i + lag)];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return best_lag;
}

}  // namespace nvmag
