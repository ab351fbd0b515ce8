#include "nvmag/widefield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nvmag/errors.hpp"

namespace nvmag {

std::size_t ImagingConfig::n_pixels() const {
  return static_cast<std::size_t>(std::llround(fov_x * fov_y / pixel_area));
}

void ImagingConfig::validate() const {
  if (!(fov_x > 0.0) || !(fov_y > 0.0)) throw DomainError("imaging: fov must be > 0");
  if (!(pixel_area > 0.0)) throw DomainError("imaging: pixel_area must be > 0");
  if (n_pixels() < 1) throw DomainError("imaging: field of view smaller than one pixel");
  if (bit_depth != 8 && bit_depth != 10 && bit_depth != 12 && bit_depth != 16)
    throw DomainError("imaging: bit_depth must be 8, 10, 12 or 16");
  if (!(total_fluorescence > 0.0)) throw DomainError("imaging: total_fluorescence must be > 0");
  model.validate();
}

double per_pixel_sensitivity(const ImagingConfig& cfg) {
  cfg.validate();
  PhotonBudget budget;
  budget.detected_optical_power = cfg.total_fluorescence;
  return cw_shot_noise_sensitivity(cfg.model,
                                   budget.detection_rate() / static_cast<double>(cfg.n_pixels()));
}

double array_sensitivity(const ImagingConfig& cfg) {
  cfg.validate();
  PhotonBudget budget;
  budget.detected_optical_power = cfg.total_fluorescence;
  return cw_shot_noise_sensitivity(cfg.model, budget);
}

namespace {

void check_bit_depth(int bits) {
  if (bits != 8 && bits != 10 && bits != 12 && bits != 16)
    throw DomainError("quantize: bit_depth must be 8, 10, 12 or 16");
}

}  // namespace

ImageU16 quantize_frame(const ImageD& frame, int bit_depth, BlackLevel correction) {
  check_bit_depth(bit_depth);
  const double levels = std::ldexp(1.0, bit_depth) - 1.0;
  ImageU16 out(frame.width, frame.height);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    const double v = (frame.pixels[i] - correction.black_level) * correction.gain;
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("quantize: value outside [0, 1]");
    out.pixels[i] = static_cast<std::uint16_t>(std::lround(v * levels));
  }
  return out;
}

ImageD normalize_levels(const ImageU16& frame, int bit_depth) {
  check_bit_depth(bit_depth);
  const double levels = std::ldexp(1.0, bit_depth) - 1.0;
  ImageD out(frame.width, frame.height);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) out.pixels[i] = frame.pixels[i] / levels;
  return out;
}

ImageD mw_gradient_contrast_map(const ImagingConfig& cfg, const ArtifactScene& scene,
                                double drive_frequency) {
  cfg.model.validate();
  const ImageD& offsets = scene.resonance_offset_map;
  if (offsets.pixels.size() != offsets.width * offsets.height || offsets.pixels.empty())
    throw DomainError("mw_gradient_contrast_map: malformed offset map");
  ImageD out(offsets.width, offsets.height);
  for (std::size_t i = 0; i < offsets.pixels.size(); ++i)
    out.pixels[i] = lineshape(cfg.model.shifted(offsets.pixels[i]), drive_frequency);
  return out;
}

ImageD shift_frame(const ImageD& frame, Displacement d) {
  if (frame.pixels.empty()) return frame;
  ImageD out(frame.width, frame.height);
  const auto max_x = static_cast<double>(frame.width - 1);
  const auto max_y = static_cast<double>(frame.height - 1);
  for (std::size_t y = 0; y < frame.height; ++y) {
    const double sy = std::clamp(static_cast<double>(y) - d.dy, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(std::floor(sy));
    const std::size_t y1 = std::min(y0 + 1, frame.height - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < frame.width; ++x) {
      const double sx = std::clamp(static_cast<double>(x) - d.dx, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const std::size_t x1 = std::min(x0 + 1, frame.width - 1);
      const double fx = sx - static_cast<double>(x0);
      double v = frame.at(x0, y0);
      if (fx != 0.0 || fy != 0.0) {
        v = (1.0 - fy) * ((1.0 - fx) * frame.at(x0, y0) + fx * frame.at(x1, y0)) +
            fy * ((1.0 - fx) * frame.at(x0, y1) + fx * frame.at(x1, y1));
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

ImageD jitter_average(std::span<const ImageD> frames, const ArtifactScene& scene) {
  if (frames.empty()) throw DomainError("jitter_average: empty stack");
  const auto& series = scene.displacement_series;
  if (!series.empty() && series.size() != frames.size())
    throw DomainError("jitter_average: displacement series length differs from stack");
  ImageD acc(frames.front().width, frames.front().height, 0.0);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!frames[k].same_shape(acc)) throw DomainError("jitter_average: frames differ in size");
    const Displacement d = series.empty() ? Displacement{} : series[k];
    if (!std::isfinite(d.dx) || !std::isfinite(d.dy))
      throw DomainError("jitter_average: non-finite displacement");
    if (d.dx == 0.0 && d.dy == 0.0) {
      for (std::size_t i = 0; i < acc.pixels.size(); ++i) acc.pixels[i] += frames[k].pixels[i];
    } else {
      const ImageD shifted = shift_frame(frames[k], d);
      for (std::size_t i = 0; i < acc.pixels.size(); ++i) acc.pixels[i] += shifted.pixels[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(frames.size());
  for (double& v : acc.pixels) v *= inv;
  return acc;
}

std::vector<Displacement> gaussian_jitter(std::size_t frames, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian_jitter: sigma must be >= 0");
  std::vector<Displacement> out(frames);
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  for (auto& d : out) {
    d.dx = g(rng);
    d.dy = g(rng);
  }
  return out;
}

std::vector<Displacement> vibration(std::size_t frames, double frame_rate, double frequency,
                                    double amplitude) {
  if (!(frame_rate > 0.0)) throw DomainError("vibration: frame_rate must be > 0");
  std::vector<Displacement> out(frames);
  for (std::size_t k = 0; k < frames; ++k)
    out[k].dx = amplitude * std::sin(2.0 * std::numbers::pi * frequency * static_cast<double>(k) / frame_rate);
  return out;
}

double region_mean(const ImageD& img, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
  if (w == 0 || h == 0 || x0 + w > img.width || y0 + h > img.height)
    throw DomainError("region_mean: region outside image");
  double acc = 0.0;
  for (std::size_t y = y0; y < y0 + h; ++y)
    for (std::size_t x = x0; x < x0 + w; ++x) acc += img.at(x, y);
  return acc / static_cast<double>(w * h);
}

}  // namespace nvmag
