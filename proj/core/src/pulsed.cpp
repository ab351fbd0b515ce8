#include "nvmag/pulsed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nvmag/errors.hpp"

namespace nvmag {

void PulseSequence::validate() const {
  if (!(init_duration > 0.0) || !(mw_duration > 0.0) || !(readout_duration > 0.0))
    throw DomainError("pulse sequence: durations must be > 0");
  if (n_readouts_per_cycle < 1 || n_readouts_per_cycle > 3)
    throw DomainError("pulse sequence: n_readouts_per_cycle must be 1, 2 or 3");
}

void PulsedReadoutModel::validate() const {
  if (decay_time_at_powers.empty()) throw DomainError("readout model: empty decay-time map");
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& [power, tau] : decay_time_at_powers) {
    if (!(power >= 0.0)) throw DomainError("readout model: powers must be >= 0");
    if (!(tau > 0.0)) throw DomainError("readout model: decay times must be > 0");
    if (tau > previous) throw DomainError("readout model: decay time must not increase with power");
    previous = tau;
  }
  if (!std::isfinite(delta_v0)) throw DomainError("readout model: delta_v0 must be finite");
}

void RabiModel::validate() const {
  if (!(pi_time > 0.0)) throw DomainError("rabi: pi_time must be > 0");
  if (!(rabi_decay > 0.0)) throw DomainError("rabi: rabi_decay must be > 0");
}

DecayTime decay_time(const PulsedReadoutModel& model, double power) {
  model.validate();
  const auto& map = model.decay_time_at_powers;
  const double lo = map.begin()->first, hi = map.rbegin()->first;
  if (power <= lo) return {map.begin()->second, power < lo};
  if (power >= hi) return {map.rbegin()->second, power > hi};
  const auto upper = map.upper_bound(power);
  const auto lower = std::prev(upper);
  const double u = (power - lower->first) / (upper->first - lower->first);
  return {lower->second + u * (upper->second - lower->second), false};
}

ReadoutDifference readout_difference(const PulsedReadoutModel& model, double t, double power) {
  const DecayTime tau = decay_time(model, power);
  return {model.delta_v0 * std::exp(-t / tau.seconds), tau.seconds, tau.clamped};
}

namespace {

struct RawFit {
  double amplitude;
  double rate;  // 1 / tau
};

// Levenberg-Marquardt on (A, k) for A exp(-k t), seeded by a log-linear fit.
RawFit fit_decay(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();

  // seed: weighted log-linear regression on positive samples
  double sw = 0.0, st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) continue;
    const double w = y[i] * y[i];
    const double l = std::log(y[i]);
    sw += w;
    st += w * t[i];
    sl += w * l;
    stt += w * t[i] * t[i];
    stl += w * t[i] * l;
  }
  double k = 0.0, a = 0.0;
  const double det = sw * stt - st * st;
  if (sw > 0.0 && det > 0.0) {
    k = -(sw * stl - st * sl) / det;
    a = std::exp((sl + k * st) / sw);
  }
  if (!(k > 0.0) || !std::isfinite(a)) {
    // fall back to the span of the record
    k = 1.0 / std::max(t[n - 1] - t[0], 1e-300);
    a = y[0];
  }

  auto sse = [&](double amp, double rate) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - amp * std::exp(-rate * t[i]);
      acc += r * r;
    }
    return acc;
  };

  double lambda = 1e-3;
  double cost = sse(a, k);
  for (int iter = 0; iter < 200; ++iter) {
    double jaa = 0.0, jak = 0.0, jkk = 0.0, ga = 0.0, gk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-k * t[i]);
      const double r = y[i] - a * e;
      const double da = e, dk = -a * t[i] * e;
      jaa += da * da;
      jak += da * dk;
      jkk += dk * dk;
      ga += da * r;
      gk += dk * r;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      const double m00 = jaa * (1.0 + lambda), m11 = jkk * (1.0 + lambda);
      const double d = m00 * m11 - jak * jak;
      if (!(d > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double step_a = (ga * m11 - gk * jak) / d;
      const double step_k = (gk * m00 - ga * jak) / d;
      const double c = sse(a + step_a, k + step_k);
      if (c <= cost) {
        const double rel = std::abs(step_a) / (std::abs(a) + 1e-300) + std::abs(step_k) / (std::abs(k) + 1e-300);
        a += step_a;
        k += step_k;
        const bool converged = (cost - c) <= 1e-15 * cost || rel < 1e-13;
        cost = c;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (converged) return {a, k};
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  return {a, k};
}

}  // namespace

ExponentialFit fit_exponential(std::span<const double> times, std::span<const double> values,
                               double noise_std) {
  if (times.size() != values.size()) throw DomainError("fit_exponential: length mismatch");
  if (times.size() < 8) throw DomainError("fit_exponential: need at least 8 samples");
  if (!(noise_std >= 0.0)) throw DomainError("fit_exponential: noise_std must be >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("fit_exponential: times must increase");

  const RawFit best = fit_decay(times, values);
  if (!(best.rate > 0.0) || !std::isfinite(best.rate))
    throw FitError("fit_exponential: data do not decay");
  ExponentialFit out{best.amplitude, 1.0 / best.rate, 0.0, 0.0};
  if (times.back() - times.front() < 2.0 * out.decay_time)
    throw FitError("fit_exponential: record spans fewer than two decay times");

  if (noise_std > 0.0) {
    std::vector<double> shifted(values.begin(), values.end());
    for (double sign : {1.0, -1.0}) {
      for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = values[i] + sign * noise_std;
      const RawFit f = fit_decay(times, shifted);
      if (!(f.rate > 0.0)) {
        out.decay_time_error = std::numeric_limits<double>::infinity();
        continue;
      }
      out.amplitude_error = std::max(out.amplitude_error, std::abs(f.amplitude - out.amplitude));
      out.decay_time_error = std::max(out.decay_time_error, std::abs(1.0 / f.rate - out.decay_time));
    }
  }
  return out;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("fit_linear: length mismatch");
  if (x.size() < 2) throw DomainError("fit_linear: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_linear: x values are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double rabi_contrast(const RabiModel& rabi, double tau) {
  rabi.validate();
  const double s = std::sin(0.5 * std::numbers::pi * tau / rabi.pi_time);
  const double damping = std::isinf(rabi.rabi_decay) ? 1.0 : std::exp(-tau / rabi.rabi_decay);
  return s * s * damping;
}

double optimal_pi_time(const RabiModel& rabi, double scan_range, double resolution) {
  rabi.validate();
  if (!(scan_range >= 2.0 * rabi.pi_time))
    throw DomainError("optimal_pi_time: scan must cover [0, 2 pi_time]");
  if (!(resolution > 0.0)) throw DomainError("optimal_pi_time: resolution must be > 0");

  const auto steps = static_cast<std::size_t>(std::floor(scan_range / resolution));
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double c = rabi_contrast(rabi, resolution * static_cast<double>(i));
    if (c > best_val) {
      best_val = c;
      best = i;
    }
  }
  double tau = resolution * static_cast<double>(best);
  if (best > 0 && best < steps) {
    const double ym = rabi_contrast(rabi, tau - resolution);
    const double yp = rabi_contrast(rabi, tau + resolution);
    const double denom = ym - 2.0 * best_val + yp;
    if (denom < 0.0) tau += 0.5 * resolution * (ym - yp) / denom;
  }
  return tau;
}

double sensing_bandwidth(int n_readouts, double cycle_time_per_readout) {
  if (n_readouts < 1) throw DomainError("sensing_bandwidth: n_readouts must be >= 1");
  if (!(cycle_time_per_readout > 0.0))
    throw DomainError("sensing_bandwidth: cycle_time_per_readout must be > 0");
  return 1.0 / (n_readouts * cycle_time_per_readout);
}

ReadoutTrace simulate_readout_trace(const PulsedReadoutModel& model, const PulseSequence& seq,
                                    const RabiModel& rabi, double power, double sample_rate,
                                    double noise_std, int repetitions, std::uint64_t seed) {
  seq.validate();
  if (!(sample_rate > 0.0)) throw DomainError("readout trace: sample_rate must be > 0");
  if (repetitions < 1) throw DomainError("readout trace: repetitions must be >= 1");
  if (!(noise_std >= 0.0)) throw DomainError("readout trace: noise_std must be >= 0");

  const auto n = static_cast<std::size_t>(std::llround(seq.readout_duration * sample_rate));
  const double efficiency = rabi_contrast(rabi, seq.mw_duration);
  ReadoutTrace trace;
  trace.times.resize(n);
  trace.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    trace.times[i] = static_cast<double>(i) / sample_rate;
    trace.values[i] = efficiency * readout_difference(model, trace.times[i], power).volts;
  }
  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    // averaging `repetitions` independent cycles
    std::normal_distribution<double> noise(0.0, noise_std / std::sqrt(static_cast<double>(repetitions)));
    for (double& v : trace.values) v += noise(rng);
  }
  return trace;
}

}  // namespace nvmag
