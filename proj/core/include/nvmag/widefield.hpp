#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nvmag/odmr.hpp"

namespace nvmag {

/// Row-major 2D pixel grid.
template <class T>
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<T> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), pixels(w * h, fill) {}

  T& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  const T& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

using ImageD = Image<double>;
using ImageU16 = Image<std::uint16_t>;

struct ImagingConfig {
  double fov_x = 5e-3;                // m
  double fov_y = 5e-3;                // m
  double pixel_area = 3.5e-6 * 3.5e-6;  // m^2 (3.5 um pitch)
  int bit_depth = 16;
  double total_fluorescence = 6e-3;   // W
  OdmrModel model = default_model();

  static OdmrModel default_model() {
    OdmrModel m;
    m.fwhm = 1e6;
    m.n_hyperfine_lines = 1;
    m.contrast_per_line = 0.02;
    return m;
  }

  /// round(fov area / pixel area)
  std::size_t n_pixels() const;
  void validate() const;
};

struct Displacement {
  double dx = 0.0;  // pixels
  double dy = 0.0;
};

struct ArtifactScene {
  ImageD resonance_offset_map;  // Hz per pixel
  std::vector<Displacement> displacement_series;
  double vibration_frequency = 7.0;  // Hz
};

/// Shot-noise-limited sensitivity of one pixel, with the fluorescence split
/// evenly over n_pixels.
double per_pixel_sensitivity(const ImagingConfig& cfg);
/// Sensitivity of the whole array read as a single detector.
double array_sensitivity(const ImagingConfig& cfg);

/// Optional analog black-level correction applied before quantization:
/// value' = (value - black_level) * gain.
struct BlackLevel {
  double black_level = 0.0;
  double gain = 1.0;
};

/// round(value * (2^bits - 1)). Throws DomainError for unsupported bit
/// depths or values outside [0, 1] after correction.
ImageU16 quantize_frame(const ImageD& frame, int bit_depth, BlackLevel correction = {});
/// Inverse scaling back to [0, 1].
ImageD normalize_levels(const ImageU16& frame, int bit_depth);

/// Lineshape at drive_frequency per pixel, each pixel's resonance moved by
/// its entry of the offset map.
ImageD mw_gradient_contrast_map(const ImagingConfig& cfg, const ArtifactScene& scene,
                                double drive_frequency);

/// Frame sampled at (x - dx, y - dy) with bilinear interpolation and edge clamping.
ImageD shift_frame(const ImageD& frame, Displacement d);

/// Shifts frame k by displacement_series[k] and averages in frame order.
ImageD jitter_average(std::span<const ImageD> frames, const ArtifactScene& scene);

/// Gaussian jitter, std sigma pixels per axis.
std::vector<Displacement> gaussian_jitter(std::size_t frames, double sigma, std::uint64_t seed);
/// Sinusoidal vibration along x at `frequency`, sampled at frame_rate.
std::vector<Displacement> vibration(std::size_t frames, double frame_rate, double frequency,
                                    double amplitude);

/// Mean over the rectangle [x0, x0 + w) x [y0, y0 + h).
double region_mean(const ImageD& img, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h);

}  // namespace nvmag
