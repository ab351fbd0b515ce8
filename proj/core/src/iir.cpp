#include "nvmag/iir.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "nvmag/errors.hpp"

namespace nvmag {

namespace {

constexpr double kPi = std::numbers::pi;

void check_frequency(double f, double fs, const char* what) {
  if (!(fs > 0.0)) throw DomainError("filter: sample_rate must be > 0");
  if (!(f > 0.0 && f < 0.5 * fs))
    throw DomainError(std::string("filter: ") + what + " must lie in (0, sample_rate/2)");
}

}  // namespace

double Biquad::pole_radius() const {
  const double disc = a1 * a1 - 4.0 * a2;
  if (disc < 0.0) return std::sqrt(a2);
  const double s = std::sqrt(disc);
  return std::max(std::abs(0.5 * (-a1 + s)), std::abs(0.5 * (-a1 - s)));
}

double Biquad::magnitude(double f, double fs) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * kPi * f / fs);
  const std::complex<double> z2 = z1 * z1;
  return std::abs((b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2));
}

double SosFilter::magnitude(double f, double fs) const {
  double m = 1.0;
  for (const auto& s : sections_) m *= s.magnitude(f, fs);
  return m;
}

double SosFilter::pole_radius() const {
  double r = 0.0;
  for (const auto& s : sections_) r = std::max(r, s.pole_radius());
  return r;
}

namespace {

// residual of the slowest transient at the far edge of the padding
constexpr double kPadDecay = 1e-7;
constexpr std::size_t kPredictorOrder = 64;
// lag spacing of the least-squares predictor; widens its reach on oversampled tones
constexpr std::size_t kPredictorStride = 8;
constexpr std::size_t kPredictorSpan = 16384;
// stop raising the order once the prediction error is at rounding level
constexpr double kPredictorFloor = 1e-13;
// singular values below this fraction of the largest are dropped
constexpr double kPredictorRcond = 1e-10;
// an extrapolation beyond this multiple of the fitted span's peak is unstable
constexpr double kPredictorGrowth = 10.0;

// Transposed direct form II; optionally starts in the steady state for a
// constant input equal to the first sample.
void run_cascade(const std::vector<Biquad>& sections, std::span<double> y, bool steady_start) {
  if (y.empty()) return;
  double level = y.front();
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    if (steady_start) {
      const double g = s.dc_gain();
      z1 = (g - s.b0) * level;
      z2 = (s.b2 - s.a2 * g) * level;
      level *= g;
    }
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

// Burg estimate of prediction-error filter coefficients a[0..p], a[0] = 1.
std::vector<double> burg(std::span<const double> x, std::size_t order) {
  const std::size_t n = x.size();
  std::vector<double> a{1.0};
  std::vector<double> f(x.begin(), x.end()), b(x.begin(), x.end());
  double power = 0.0;
  for (double v : x) power += v * v;
  const double floor = kPredictorFloor * power;
  for (std::size_t m = 1; m <= order && m < n && power > floor; ++m) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = m; i < n; ++i) {
      num += f[i] * b[i - 1];
      den += f[i] * f[i] + b[i - 1] * b[i - 1];
    }
    if (!(den > 0.0)) break;
    const double k = std::clamp(-2.0 * num / den, -1.0, 1.0);
    power *= 1.0 - k * k;
    std::vector<double> next(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) next[i] = a[i];
    for (std::size_t i = 0; i <= m; ++i) next[i] += k * (m - i < a.size() ? a[m - i] : 0.0);
    a = std::move(next);
    // update from the top so b[i - 1] is still the previous order's value
    for (std::size_t i = n - 1; i >= m; --i) {
      const double fi = f[i], bi = b[i - 1];
      f[i] = fi + k * bi;
      b[i] = bi + k * fi;
    }
  }
  return a;
}

// Forward-backward least-squares predictor on lags stride, 2 stride, ...,
// order stride: x[n] ~ sum c[i] x[n - (i + 1) stride]. Returns a[0..order]
// with a[0] = 1 and a[i + 1] = -c[i], solved for minimum-norm coefficients.
// Unbiased on clean tones, unlike Burg.
std::vector<double> least_squares_predictor(std::span<const double> x, std::size_t order, std::size_t stride) {
  const std::size_t reach = order * stride;
  const auto rows = static_cast<Eigen::Index>(x.size() - reach);
  const auto p = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd A(2 * rows, p);
  Eigen::VectorXd y(2 * rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto fwd = static_cast<std::size_t>(r) + reach, bwd = static_cast<std::size_t>(r);
    for (Eigen::Index i = 0; i < p; ++i) {
      const std::size_t lag = (static_cast<std::size_t>(i) + 1) * stride;
      A(r, i) = x[fwd - lag];
      A(rows + r, i) = x[bwd + lag];
    }
    y(r) = x[fwd];
    y(rows + r) = x[bwd];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kPredictorRcond);
  cod.compute(A);
  const Eigen::VectorXd c = cod.solve(y);
  std::vector<double> a(order + 1, 1.0);
  for (std::size_t i = 0; i < order; ++i) a[i + 1] = -c(static_cast<Eigen::Index>(i));
  return a;
}

std::vector<double> extrapolate(std::span<const double> history, const std::vector<double>& a,
                                std::size_t count, std::size_t stride = 1) {
  const std::size_t p = a.size() - 1;
  std::vector<double> hist(history.end() - static_cast<std::ptrdiff_t>(std::min(p * stride, history.size())),
                           history.end());
  hist.reserve(hist.size() + count);
  for (std::size_t j = 0; j < count; ++j) {
    double pred = 0.0;
    for (std::size_t i = 1; i <= p && i * stride <= hist.size(); ++i) pred -= a[i] * hist[hist.size() - i * stride];
    hist.push_back(pred);
  }
  return {hist.end() - static_cast<std::ptrdiff_t>(count), hist.end()};
}

// `count` samples continuing `x` past its end by linear prediction on the
// last samples, about their mean.
std::vector<double> predict_forward(std::span<const double> x, std::size_t count) {
  const std::size_t span = std::min(x.size(), kPredictorSpan);
  const auto tail = x.subspan(x.size() - span);
  double mu = 0.0;
  for (double v : tail) mu += v;
  mu /= static_cast<double>(span);
  std::vector<double> centred(tail.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < span; ++i) {
    centred[i] = tail[i] - mu;
    peak = std::max(peak, std::abs(centred[i]));
  }

  const auto bounded = [&](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [&](double s) { return std::isfinite(s) && std::abs(s) <= kPredictorGrowth * peak; });
  };
  const std::size_t order = std::min(kPredictorOrder, span / 8);
  const std::size_t stride = std::clamp<std::size_t>(order > 0 ? span / (4 * order) : 1, 1, kPredictorStride);
  std::vector<double> out(count, 0.0);
  if (order >= 1 && peak > 0.0) {
    auto ls = extrapolate(centred, least_squares_predictor(centred, order, stride), count, stride);
    if (bounded(ls)) {
      out = std::move(ls);
    } else {
      auto fallback = extrapolate(centred, burg(centred, std::min<std::size_t>(32, span / 2)), count);
      if (bounded(fallback)) out = std::move(fallback);
    }
  }
  for (double& v : out) v += mu;
  return out;
}

}  // namespace

std::vector<double> SosFilter::filter(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  run_cascade(sections_, y, false);
  return y;
}

std::vector<double> SosFilter::filtfilt(std::span<const double> x) const {
  const std::size_t n = x.size();
  if (n < 2 || sections_.empty()) return {x.begin(), x.end()};

  const double r = pole_radius();
  if (!(r < 1.0)) throw DomainError("filtfilt: unstable filter");
  std::size_t pad = 6 * sections_.size();
  if (r > 0.0) pad = std::max(pad, static_cast<std::size_t>(std::ceil(std::log(kPadDecay) / std::log(r))));

  std::vector<double> reversed(x.rbegin(), x.rend());
  const auto before = predict_forward(reversed, pad);
  const auto after = predict_forward(x, pad);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  ext.insert(ext.end(), before.rbegin(), before.rend());
  ext.insert(ext.end(), x.begin(), x.end());
  ext.insert(ext.end(), after.begin(), after.end());

  run_cascade(sections_, ext, true);
  std::reverse(ext.begin(), ext.end());
  run_cascade(sections_, ext, true);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

namespace design {

namespace {

std::vector<Biquad> butterworth(int order, double cutoff, double fs, bool highpass) {
  if (order < 1 || order > 16) throw DomainError("butterworth: order must lie in [1, 16]");
  check_frequency(cutoff, fs, "cutoff");
  const double w0 = 2.0 * kPi * cutoff / fs;
  const double cw = std::cos(w0), sw = std::sin(w0);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double q = 1.0 / (2.0 * std::sin(kPi * (2.0 * k + 1.0) / (2.0 * order)));
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad s;
    if (highpass) {
      s.b0 = 0.5 * (1.0 + cw) / a0;
      s.b1 = -(1.0 + cw) / a0;
    } else {
      s.b0 = 0.5 * (1.0 - cw) / a0;
      s.b1 = (1.0 - cw) / a0;
    }
    s.b2 = s.b0;
    s.a1 = -2.0 * cw / a0;
    s.a2 = (1.0 - alpha) / a0;
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double k = std::tan(0.5 * w0);
    Biquad s;
    s.b0 = (highpass ? 1.0 : k) / (1.0 + k);
    s.b1 = highpass ? -s.b0 : s.b0;
    s.a1 = (k - 1.0) / (k + 1.0);
    sections.push_back(s);
  }
  return sections;
}

}  // namespace

SosFilter butterworth_lowpass(int order, double cutoff, double sample_rate) {
  return SosFilter(butterworth(order, cutoff, sample_rate, false));
}

SosFilter butterworth_highpass(int order, double cutoff, double sample_rate) {
  return SosFilter(butterworth(order, cutoff, sample_rate, true));
}

SosFilter notch(double center, double bandwidth, double sample_rate) {
  check_frequency(center, sample_rate, "notch center");
  if (!(bandwidth > 0.0) || !(bandwidth < center))
    throw DomainError("notch: bandwidth must lie in (0, center)");
  const double w0 = 2.0 * kPi * center / sample_rate;
  // bilinear-prewarped bandwidth gives an exact -3 dB width in Hz
  const double beta = std::tan(kPi * bandwidth / sample_rate);
  const double a0 = 1.0 + beta;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(w0) / a0;
  s.b2 = s.b0;
  s.a1 = s.b1;
  s.a2 = (1.0 - beta) / a0;
  return SosFilter({s});
}

}  // namespace design

}  // namespace nvmag
