#include "nvmag/mainsfilter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nvmag/errors.hpp"
#include "nvmag/iir.hpp"

namespace nvmag {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinCycles = 10.0;

std::size_t window_samples(double window, double sample_rate) {
  return static_cast<std::size_t>(std::llround(window * sample_rate));
}

void check_in_band(double f, double fs, const std::string& field) {
  if (!(f > 0.0 && f < 0.5 * fs))
    throw DomainError("filter chain: " + field + " must lie in (0, sample_rate/2)");
}

}  // namespace

Timeseries zero_phase_filter(const Timeseries& ts, FilterKind kind, const FilterParams& params) {
  ts.validate();
  SosFilter filter;
  switch (kind) {
    case FilterKind::highpass:
      filter = design::butterworth_highpass(params.order, params.frequency, ts.sample_rate);
      break;
    case FilterKind::lowpass:
      filter = design::butterworth_lowpass(params.order, params.frequency, ts.sample_rate);
      break;
    case FilterKind::notch:
      filter = design::notch(params.frequency, params.bandwidth, ts.sample_rate);
      break;
  }
  return Timeseries(ts.sample_rate, filter.filtfilt(ts.samples), ts.unit);
}

double FilterChainConfig::phase_offset(std::size_t harmonic) const {
  return harmonic < phase_offsets.size() ? phase_offsets[harmonic] : 0.0;
}

int FilterChainConfig::passes(std::size_t harmonic) const {
  return harmonic < subtraction_passes.size() ? subtraction_passes[harmonic] : 1;
}

void FilterChainConfig::validate(double sample_rate) const {
  if (!(sample_rate > 0.0)) throw DomainError("filter chain: sample_rate must be > 0");
  check_in_band(mains_fundamental, sample_rate, "mains_fundamental");
  check_in_band(highpass_cutoff, sample_rate, "highpass_cutoff");
  check_in_band(lowpass_cutoff, sample_rate, "lowpass_cutoff");
  if (!(lowpass_cutoff > highpass_cutoff))
    throw DomainError("filter chain: lowpass_cutoff must exceed highpass_cutoff");
  if (!(notch_bandwidth > 0.0)) throw DomainError("filter chain: notch_bandwidth must be > 0");
  for (double c : notch_centers) {
    check_in_band(c, sample_rate, "notch_centers");
    if (!(notch_bandwidth < c)) throw DomainError("filter chain: notch_bandwidth must be below every notch center");
  }
  if (phase_offsets.size() > tracked_harmonics.size())
    throw DomainError("filter chain: more phase_offsets than tracked_harmonics");
  if (subtraction_passes.size() > tracked_harmonics.size())
    throw DomainError("filter chain: more subtraction_passes than tracked_harmonics");
  for (int p : subtraction_passes)
    if (p < 0) throw DomainError("filter chain: subtraction_passes must be >= 0");
  double lowest = mains_fundamental;
  for (double h : tracked_harmonics) {
    check_in_band(h, sample_rate, "tracked_harmonics");
    const double k = h / mains_fundamental;
    if (std::abs(k - std::round(k)) > 1e-9 || std::round(k) < 1.0)
      throw DomainError("filter chain: tracked_harmonics must be integer multiples of mains_fundamental");
    lowest = std::min(lowest, h);
  }
  if (!(tracking_window * lowest >= kMinCycles))
    throw DomainError("filter chain: tracking_window must cover at least 10 cycles of the lowest tracked frequency");
}

double PhaseSeries::phase_at(double t) const {
  if (times.empty()) return 0.0;
  if (t <= times.front()) return phases.front();
  if (t >= times.back()) return phases.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto j = static_cast<std::size_t>(it - times.begin());
  const double u = (t - times[j - 1]) / (times[j] - times[j - 1]);
  return phases[j - 1] + u * (phases[j] - phases[j - 1]);
}

PhaseSeries estimate_phase_drift(const Timeseries& reference, double frequency, double window) {
  reference.validate();
  if (!(frequency > 0.0 && frequency < 0.5 * reference.sample_rate))
    throw DomainError("estimate_phase_drift: frequency must lie in (0, sample_rate/2)");
  if (!(window * frequency >= kMinCycles))
    throw DomainError("estimate_phase_drift: window must span at least 10 cycles");
  if (!(reference.duration() >= 2.0 * window))
    throw DomainError("estimate_phase_drift: record shorter than two windows");

  const std::size_t n = reference.size();
  const std::size_t w = window_samples(window, reference.sample_rate);
  const std::size_t hop = std::max<std::size_t>(1, w / 2);
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + w <= n; s += hop) starts.push_back(s);
  if (starts.back() + w < n) starts.push_back(n - w);

  PhaseSeries out;
  out.window = static_cast<double>(w) / reference.sample_rate;
  const double omega = kTwoPi * frequency;
  for (std::size_t s : starts) {
    double ss = 0.0, cc = 0.0, sc = 0.0, xs = 0.0, xc = 0.0;
    for (std::size_t i = s; i < s + w; ++i) {
      const double t = reference.time(i);
      const double sn = std::sin(omega * t), cs = std::cos(omega * t);
      ss += sn * sn;
      cc += cs * cs;
      sc += sn * cs;
      xs += reference.samples[i] * sn;
      xc += reference.samples[i] * cs;
    }
    const double det = ss * cc - sc * sc;
    const double a = (xs * cc - xc * sc) / det;
    const double b = (xc * ss - xs * sc) / det;
    double phi = std::atan2(b, a);
    if (!out.phases.empty()) phi += kTwoPi * std::round((out.phases.back() - phi) / kTwoPi);
    out.times.push_back((static_cast<double>(s) + 0.5 * static_cast<double>(w - 1)) /
                        reference.sample_rate);
    out.phases.push_back(phi);
    out.amplitudes.push_back(std::hypot(a, b));
  }
  return out;
}

PhaseSeries harmonic_phase(const PhaseSeries& fundamental, int k, double offset) {
  if (k < 1) throw DomainError("harmonic_phase: harmonic index must be >= 1");
  PhaseSeries out = fundamental;
  for (double& p : out.phases) p = k * p + offset;
  return out;
}

Timeseries coherent_subtract(const Timeseries& ts, const PhaseSeries& phase, double frequency,
                             int passes) {
  ts.validate();
  if (phase.times.empty() || phase.times.size() != phase.phases.size())
    throw DomainError("coherent_subtract: empty or malformed phase series");
  if (passes < 0) throw DomainError("coherent_subtract: passes must be >= 0");

  const std::size_t n = ts.size();
  const double fs = ts.sample_rate;
  const std::size_t w = std::min(n, window_samples(phase.window, fs));
  if (w == 0) throw DomainError("coherent_subtract: zero-length window");

  // window bounds from centres
  const std::size_t m = phase.times.size();
  std::vector<std::size_t> begin(m), end(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double first = phase.times[j] * fs - 0.5 * static_cast<double>(w - 1);
    const auto b = static_cast<std::ptrdiff_t>(std::llround(first));
    begin[j] = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(n - w)));
    end[j] = begin[j] + w;
  }
  if (begin.front() > 1 || end.back() + 1 < n)
    throw DomainError("coherent_subtract: phase series does not cover the record");

  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = kTwoPi * frequency * ts.time(i) + phase.phase_at(ts.time(i));

  Timeseries out = ts;
  std::vector<double> tmpl(n), amp(m);
  for (int p = 0; p < passes; ++p) {
    const double shift = 0.5 * std::numbers::pi * p;
    for (std::size_t i = 0; i < n; ++i) tmpl[i] = std::sin(theta[i] + shift);
    for (std::size_t j = 0; j < m; ++j) {
      double xs = 0.0, ss = 0.0;
      for (std::size_t i = begin[j]; i < end[j]; ++i) {
        xs += out.samples[i] * tmpl[i];
        ss += tmpl[i] * tmpl[i];
      }
      amp[j] = ss > 0.0 ? xs / ss : 0.0;
    }
    // cross-fade: amplitude interpolated linearly between window centres
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = ts.time(i);
      while (j + 1 < m && phase.times[j + 1] <= t) ++j;
      double a;
      if (t <= phase.times.front()) {
        a = amp.front();
      } else if (j + 1 >= m) {
        a = amp.back();
      } else {
        const double u = (t - phase.times[j]) / (phase.times[j + 1] - phase.times[j]);
        a = amp[j] + u * (amp[j + 1] - amp[j]);
      }
      out.samples[i] -= a * tmpl[i];
    }
  }
  return out;
}

PipelineStages run_pipeline_stages(const Timeseries& ts, const Timeseries& reference,
                                   const FilterChainConfig& cfg) {
  ts.validate();
  reference.validate();
  if (ts.sample_rate != reference.sample_rate)
    throw DomainError("run_pipeline: record and reference sample rates differ");
  if (ts.size() != reference.size())
    throw DomainError("run_pipeline: record and reference lengths differ");
  cfg.validate(ts.sample_rate);

  PipelineStages st;
  st.highpassed = zero_phase_filter(ts, FilterKind::highpass,
                                    {cfg.highpass_cutoff, 1.0, cfg.highpass_order});

  Timeseries x = st.highpassed;
  if (!cfg.tracked_harmonics.empty()) {
    const PhaseSeries fundamental =
        estimate_phase_drift(reference, cfg.mains_fundamental, cfg.tracking_window);
    for (std::size_t h = 0; h < cfg.tracked_harmonics.size(); ++h) {
      const double f = cfg.tracked_harmonics[h];
      const int k = static_cast<int>(std::lround(f / cfg.mains_fundamental));
      x = coherent_subtract(x, harmonic_phase(fundamental, k, cfg.phase_offset(h)), f, cfg.passes(h));
    }
  }
  st.subtracted = x;

  for (double c : cfg.notch_centers)
    x = zero_phase_filter(x, FilterKind::notch, {c, cfg.notch_bandwidth, 2});
  st.notched = x;

  st.output = zero_phase_filter(x, FilterKind::lowpass, {cfg.lowpass_cutoff, 1.0, cfg.lowpass_order});
  return st;
}

Timeseries run_pipeline(const Timeseries& ts, const Timeseries& reference,
                        const FilterChainConfig& cfg) {
  return run_pipeline_stages(ts, reference, cfg).output;
}

}  // namespace nvmag
