#include "nvmag/odmr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nvmag/errors.hpp"

namespace nvmag {

namespace {

// 4 / (3 sqrt 3): peak |slope| of a unit Lorentzian times its FWHM, inverted.
constexpr double kMaxSlopePrefactor = 0.769800358919501;

template <class F>
void for_each_line(const OdmrModel& m, F&& f) {
  const double mid = 0.5 * (m.n_hyperfine_lines - 1);
  const double c = m.resonance_center();
  for (int i = 0; i < m.n_hyperfine_lines; ++i) f(c + (i - mid) * m.hyperfine_spacing);
}

}  // namespace

void OdmrModel::validate() const {
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) throw DomainError("odmr: fwhm must be > 0");
  if (!(contrast_per_line >= 0.0 && contrast_per_line < 1.0))
    throw DomainError("odmr: contrast_per_line must lie in [0, 1)");
  if (n_hyperfine_lines < 1) throw DomainError("odmr: n_hyperfine_lines must be >= 1");
  if (!(hyperfine_spacing >= 0.0)) throw DomainError("odmr: hyperfine_spacing must be >= 0");
  if (!(total_contrast() < 1.0))
    throw DomainError("odmr: summed contrast must stay below 1 (fluorescence would reach 0)");
  if (!std::isfinite(center_frequency) || !std::isfinite(gyromagnetic_response) ||
      !std::isfinite(bias_field_parallel))
    throw DomainError("odmr: non-finite parameter");
}

double OdmrModel::resonance_center() const {
  return center_frequency + gyromagnetic_response * bias_field_parallel;
}

std::vector<double> OdmrModel::line_centers() const {
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(std::max(n_hyperfine_lines, 0)));
  for_each_line(*this, [&](double fc) { centers.push_back(fc); });
  return centers;
}

OdmrModel OdmrModel::shifted(double delta_hz) const {
  OdmrModel m = *this;
  m.center_frequency += delta_hz;
  return m;
}

OdmrModel OdmrModel::collapsed() const {
  OdmrModel m = *this;
  m.contrast_per_line = total_contrast();
  m.n_hyperfine_lines = 1;
  return m;
}

double PhotonBudget::detection_rate() const {
  if (!(detected_optical_power >= 0.0) || !(mean_photon_wavelength > 0.0))
    throw DomainError("photon budget: power must be >= 0 and wavelength > 0");
  return detected_optical_power * mean_photon_wavelength /
         (physics::kPlanck * physics::kSpeedOfLight);
}

double lineshape(const OdmrModel& model, double frequency) {
  model.validate();
  const double half_width = 0.5 * model.fwhm;
  double dip = 0.0;
  for_each_line(model, [&](double fc) {
    const double x = (frequency - fc) / half_width;
    dip += model.contrast_per_line / (1.0 + x * x);
  });
  return 1.0 - dip;
}

double lineshape_slope(const OdmrModel& model, double frequency) {
  model.validate();
  const double half_width = 0.5 * model.fwhm;
  double slope = 0.0;
  for_each_line(model, [&](double fc) {
    const double x = (frequency - fc) / half_width;
    const double d = 1.0 + x * x;
    // d/df [-C / (1 + x^2)] = 2 C x / (hw (1 + x^2)^2)
    slope += 2.0 * model.contrast_per_line * x / (half_width * d * d);
  });
  return slope;
}

double zeeman_shift(const OdmrModel& model, double b_parallel) {
  return model.gyromagnetic_response * b_parallel;
}

Setpoint max_slope_setpoint(const OdmrModel& model, double resolution_divisor) {
  model.validate();
  if (model.contrast_per_line == 0.0) throw NoSetpointError("odmr: flat model has no setpoint");
  if (!(resolution_divisor >= 10.0)) throw DomainError("odmr: resolution_divisor must be >= 10");

  const auto centers = model.line_centers();
  const double lo = centers.front() - 3.0 * model.fwhm;
  const double hi = centers.back() + 3.0 * model.fwhm;
  const double step = model.fwhm / resolution_divisor;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;

  auto magnitude = [&](double f) { return std::abs(lineshape_slope(model, f)); };

  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = magnitude(lo + step * static_cast<double>(i));
    // strict improvement beyond rounding keeps the lowest-frequency maximum
    if (m > best_mag * (1.0 + 1e-12)) {
      best_mag = m;
      best = i;
    }
  }
  if (!(best_mag > 0.0)) throw NoSetpointError("odmr: slope vanishes everywhere");

  // successive parabolic refinement on |slope|, bracket shrinking each round
  double x = lo + step * static_cast<double>(best);
  double h = step;
  for (int iter = 0; iter < 8; ++iter) {
    const double ym = magnitude(x - h), y0 = magnitude(x), yp = magnitude(x + h);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) {
      const double dx = 0.5 * h * (ym - yp) / denom;
      if (std::abs(dx) <= h) x += dx;
    }
    h *= 0.1;
  }
  return {x, lineshape_slope(model, x)};
}

double cw_shot_noise_sensitivity(const OdmrModel& model, double detection_rate) {
  model.validate();
  const double c = model.total_contrast();
  if (!(c > 0.0)) throw DomainError("sensitivity: contrast must be > 0");
  if (!(detection_rate > 0.0)) throw DomainError("sensitivity: detection rate must be > 0");
  if (model.gyromagnetic_response == 0.0) throw DomainError("sensitivity: zero gyromagnetic response");
  return kMaxSlopePrefactor * model.fwhm /
         (std::abs(model.gyromagnetic_response) * c * std::sqrt(detection_rate));
}

double cw_shot_noise_sensitivity(const OdmrModel& model, const PhotonBudget& budget) {
  return cw_shot_noise_sensitivity(model, budget.detection_rate());
}

double averaging_gain(std::size_t n) {
  if (n == 0) throw DomainError("averaging_gain: n must be >= 1");
  return std::sqrt(static_cast<double>(n));
}

}  // namespace nvmag
