#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvmag/lockin.hpp"
#include "nvmag/mainsfilter.hpp"
#include "nvmag/odmr.hpp"
#include "nvmag/pulsed.hpp"
#include "nvmag/spectral.hpp"
#include "nvmag/synth.hpp"
#include "nvmag/widefield.hpp"

namespace nvmag::cli {

enum class Scenario { simulate, filter, odmr, pulsed, widefield, report };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);
bool is_stochastic(Scenario s);

struct Diagnostic {
  std::string path;  // dotted config path, e.g. "odmr.model.fwhm"
  std::string message;
};

struct SimulateParams {
  double sample_rate = 25000.0;
  double duration = 60.0;
  NoiseEnvironment environment;
  std::vector<TestSignal> signals;
  int records = 1;
};

struct FilterParamsBlock {
  std::filesystem::path record;
  std::filesystem::path reference;
  FilterChainConfig chain;
  double asd_segment_seconds = 1.0;
  Band band{20.0, 500.0};
  double notch_exclusion = 2.0;  // Hz either side of each notch centre
  double probe_frequency = 111.0;
  std::optional<double> probe_amplitude;
  std::optional<double> expected_floor;
};

struct OdmrParams {
  OdmrModel model;
  FmDriveConfig drive;
  double span = 0.0;  // Hz around the resonance; 0 picks one from the model
  int points = 2001;
  PhotonBudget budget;
  int averaging_repeats = 1;
  double probe_field = 1e-9;  // T
  double calibration = 1.0;   // V per unit demod output
};

struct PulsedParams {
  PulseSequence sequence;
  PulsedReadoutModel readout;
  RabiModel rabi;
  std::vector<double> powers{20e-3, 75e-3, 120e-3, 170e-3, 218e-3};
  double sample_rate = 100e3;
  double noise_std = 2e-3;  // V per cycle
  int repetitions = 100;
  double pi_scan_range = 0.0;  // s; 0 means 3 pi_time
};

struct WidefieldParams {
  ImagingConfig imaging;
  std::size_t width = 400;
  std::size_t height = 200;
  double region_offset = 300e3;  // Hz, +- applied to left/right halves
  std::size_t region_size = 200;
  int frames = 100;
  double frame_rate = 100.0;
  double jitter_sigma = 2.0;       // px
  double vibration_amplitude = 1.0;  // px
  double dip_contrast = 0.01;
};

struct ReportParams {
  std::optional<std::filesystem::path> asd_before;
  std::optional<std::filesystem::path> asd_after;
  std::vector<std::filesystem::path> records;
  Band band{30.0, 170.0};          // spectrogram
  Band overlay_band{0.0, 1000.0};  // ASD overlay x range
  double segment_seconds = 0.0;  // 0: whole record per row
};

struct RunConfig {
  Scenario scenario = Scenario::simulate;
  std::optional<std::uint64_t> rng_seed;
  std::filesystem::path output_dir;
  SimulateParams simulate;
  FilterParamsBlock filter;
  OdmrParams odmr;
  PulsedParams pulsed;
  WidefieldParams widefield;
  ReportParams report;
};

struct LoadResult {
  RunConfig config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

struct Overrides {
  std::optional<Scenario> scenario;  // from the command line; must match the file if both given
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

/// Parses and validates without running anything. Relative input paths and
/// a relative output_dir are resolved against `base_dir`.
LoadResult parse_config(std::string_view json_text, const std::filesystem::path& base_dir,
                        const Overrides& overrides = {});
LoadResult load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace nvmag::cli
