#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nvmag::cli {

namespace {

using json = nlohmann::json;

constexpr Scenario kAllScenarios[] = {Scenario::simulate, Scenario::filter,    Scenario::odmr,
                                      Scenario::pulsed,   Scenario::widefield, Scenario::report};

// Typed access to one JSON object that records a diagnostic, with the full
// dotted path, for every missing, mistyped or out-of-domain field.
class Node {
 public:
  Node(const json* j, std::string path, std::vector<Diagnostic>& diags)
      : j_(j), path_(std::move(path)), diags_(&diags) {}

  bool present() const { return j_ != nullptr; }
  bool has(std::string_view key) const { return j_ && j_->contains(key); }
  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  const std::string& path() const { return path_; }

  void fail(const std::string& path, std::string message) const {
    diags_->push_back({path, std::move(message)});
  }
  std::size_t diagnostic_count() const { return diags_->size(); }

  Node child(std::string_view key) const {
    if (!has(key)) return {nullptr, at(key), *diags_};
    const json& c = (*j_)[std::string(key)];
    if (!c.is_object()) {
      fail(at(key), "must be an object");
      return {nullptr, at(key), *diags_};
    }
    return {&c, at(key), *diags_};
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    if (!j_) return;
    const std::set<std::string_view> allowed(keys);
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!allowed.count(it.key())) fail(at(it.key()), "unknown field");
  }

  double number(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[std::string(key)];
    if (!v.is_number()) {
      fail(at(key), "must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(at(key), "must be finite");
    return d;
  }

  double positive(std::string_view key, double fallback) const {
    const double d = number(key, fallback);
    if (has(key) && !(d > 0.0)) fail(at(key), "must be > 0");
    return d;
  }

  double non_negative(std::string_view key, double fallback) const {
    const double d = number(key, fallback);
    if (has(key) && !(d >= 0.0)) fail(at(key), "must be >= 0");
    return d;
  }

  std::optional<double> optional_number(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  long long integer(std::string_view key, long long fallback, long long lo,
                    long long hi = std::numeric_limits<long long>::max()) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[std::string(key)];
    if (!v.is_number_integer()) {
      fail(at(key), "must be an integer");
      return fallback;
    }
    const long long i = v.get<long long>();
    if (i < lo || i > hi) {
      fail(at(key), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return fallback;
    }
    return i;
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[std::string(key)];
    if (!v.is_boolean()) {
      fail(at(key), "must be true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  std::optional<std::string> string(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    const json& v = (*j_)[std::string(key)];
    if (!v.is_string()) {
      fail(at(key), "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(std::string_view key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*j_)[std::string(key)];
    if (!v.is_array()) {
      fail(at(key), "must be an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(at(key) + "[" + std::to_string(i) + "]", "must be a number");
        continue;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const json* raw(std::string_view key) const {
    return has(key) ? &(*j_)[std::string(key)] : nullptr;
  }

 private:
  const json* j_;
  std::string path_;
  std::vector<Diagnostic>* diags_;
};

// Runs a type's own validate() for cross-field invariants, reported at the
// block path, but only when field checks in that block found nothing.
template <class T>
void check_invariants(const Node& n, std::size_t diags_before, const T& value) {
  if (n.diagnostic_count() != diags_before) return;
  try {
    value.validate();
  } catch (const std::exception& e) {
    n.fail(n.path(), e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> input_path(const Node& n, std::string_view key,
                                                const std::filesystem::path& base, bool required) {
  const auto s = n.string(key);
  if (!s) {
    if (required && !n.has(key)) n.fail(n.at(key), "required");
    return std::nullopt;
  }
  auto path = resolve(base, *s);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) n.fail(n.at(key), "file not found: " + path.string());
  return path;
}

Band parse_band(const Node& n, std::string_view key, Band fallback) {
  if (!n.has(key)) return fallback;
  const auto v = n.numbers(key, {});
  if (v.size() != 2 || !(v[0] >= 0.0) || !(v[1] > v[0])) {
    n.fail(n.at(key), "must be [lo, hi] with 0 <= lo < hi");
    return fallback;
  }
  return {v[0], v[1]};
}

OdmrModel parse_model(const Node& n, OdmrModel m) {
  if (!n.present()) return m;
  const auto before = n.diagnostic_count();
  n.allow({"center_frequency", "fwhm", "contrast_per_line", "n_hyperfine_lines", "hyperfine_spacing",
           "gyromagnetic_response", "bias_field_parallel"});
  m.center_frequency = n.positive("center_frequency", m.center_frequency);
  m.fwhm = n.positive("fwhm", m.fwhm);
  m.contrast_per_line = n.number("contrast_per_line", m.contrast_per_line);
  if (n.has("contrast_per_line") && !(m.contrast_per_line >= 0.0 && m.contrast_per_line < 1.0))
    n.fail(n.at("contrast_per_line"), "must be in [0, 1)");
  m.n_hyperfine_lines = static_cast<int>(n.integer("n_hyperfine_lines", m.n_hyperfine_lines, 1, 64));
  m.hyperfine_spacing = n.non_negative("hyperfine_spacing", m.hyperfine_spacing);
  m.gyromagnetic_response = n.positive("gyromagnetic_response", m.gyromagnetic_response);
  m.bias_field_parallel = n.number("bias_field_parallel", m.bias_field_parallel);
  check_invariants(n, before, m);
  return m;
}

FmDriveConfig parse_drive(const Node& n, FmDriveConfig d) {
  if (!n.present()) return d;
  const auto before = n.diagnostic_count();
  n.allow({"modulation_frequency", "peak_deviation", "three_tone_enabled", "three_tone_spacing",
           "carrier_frequency", "integration_periods", "samples_per_period"});
  d.modulation_frequency = n.positive("modulation_frequency", d.modulation_frequency);
  d.peak_deviation = n.positive("peak_deviation", d.peak_deviation);
  d.three_tone_enabled = n.boolean("three_tone_enabled", d.three_tone_enabled);
  d.three_tone_spacing = n.positive("three_tone_spacing", d.three_tone_spacing);
  d.carrier_frequency = n.positive("carrier_frequency", d.carrier_frequency);
  d.integration_periods = static_cast<int>(n.integer("integration_periods", d.integration_periods, 1, 1 << 20));
  d.samples_per_period = static_cast<int>(n.integer("samples_per_period", d.samples_per_period, 4, 1 << 16));
  check_invariants(n, before, d);
  return d;
}

NoiseEnvironment parse_environment(const Node& n) {
  NoiseEnvironment env;
  if (!n.present()) return env;
  n.allow({"mains_fundamental", "harmonic_amplitudes", "phase_walk_sigma", "laser_drift_amplitude",
           "white_floor", "reference_noise"});
  env.mains_fundamental = n.positive("mains_fundamental", env.mains_fundamental);
  env.phase_walk_sigma = n.non_negative("phase_walk_sigma", env.phase_walk_sigma);
  env.laser_drift_amplitude = n.non_negative("laser_drift_amplitude", env.laser_drift_amplitude);
  env.white_floor = n.non_negative("white_floor", env.white_floor);
  env.reference_noise = n.non_negative("reference_noise", env.reference_noise);
  if (const json* h = n.raw("harmonic_amplitudes")) {
    const auto path = n.at("harmonic_amplitudes");
    if (!h->is_object()) {
      n.fail(path, "must be an object mapping harmonic index to amplitude");
    } else {
      for (auto it = h->begin(); it != h->end(); ++it) {
        const std::string& key = it.key();
        int k = 0;
        const auto res = std::from_chars(key.data(), key.data() + key.size(), k);
        if (res.ec != std::errc() || res.ptr != key.data() + key.size() || k < 1) {
          n.fail(path + "." + key, "harmonic index must be a positive integer");
          continue;
        }
        if (!it->is_number() || !(it->get<double>() >= 0.0)) {
          n.fail(path + "." + key, "amplitude must be a number >= 0");
          continue;
        }
        env.harmonic_amplitudes[k] = it->get<double>();
      }
    }
  }
  return env;
}

std::vector<TestSignal> parse_signals(const Node& parent, std::string_view key,
                                      std::vector<Diagnostic>& diags) {
  std::vector<TestSignal> out;
  const json* arr = parent.raw(key);
  if (!arr) return out;
  if (!arr->is_array()) {
    parent.fail(parent.at(key), "must be an array of signal objects");
    return out;
  }
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const std::string path = parent.at(key) + "[" + std::to_string(i) + "]";
    if (!(*arr)[i].is_object()) {
      parent.fail(path, "must be an object");
      continue;
    }
    Node n(&(*arr)[i], path, diags);
    n.allow({"kind", "frequency", "amplitude", "pulse_width", "repetition_rate"});
    TestSignal s;
    if (const auto kind = n.string("kind")) {
      if (*kind == "tone") s.kind = TestSignal::Kind::tone;
      else if (*kind == "biopulse") s.kind = TestSignal::Kind::biopulse;
      else n.fail(n.at("kind"), "must be \"tone\" or \"biopulse\"");
    }
    s.frequency = n.positive("frequency", s.frequency);
    s.amplitude = n.non_negative("amplitude", s.amplitude);
    s.pulse_width = n.positive("pulse_width", s.pulse_width);
    s.repetition_rate = n.positive("repetition_rate", s.repetition_rate);
    out.push_back(s);
  }
  return out;
}

void parse_simulate(const Node& n, SimulateParams& p, std::vector<Diagnostic>& diags) {
  n.allow({"sample_rate", "duration", "environment", "test_signals", "records"});
  p.sample_rate = n.positive("sample_rate", p.sample_rate);
  p.duration = n.positive("duration", p.duration);
  if (n.has("duration") && n.has("sample_rate") && p.duration * p.sample_rate < 2.0)
    n.fail(n.at("duration"), "record must hold at least 2 samples");
  p.environment = parse_environment(n.child("environment"));
  p.signals = parse_signals(n, "test_signals", diags);
  p.records = static_cast<int>(n.integer("records", p.records, 1, 10000));
}

void parse_chain(const Node& n, FilterChainConfig& c) {
  if (!n.present()) return;
  n.allow({"mains_fundamental", "highpass_cutoff", "highpass_order", "tracked_harmonics",
           "tracking_window", "phase_offsets", "subtraction_passes", "notch_centers",
           "notch_bandwidth", "lowpass_cutoff", "lowpass_order"});
  c.mains_fundamental = n.positive("mains_fundamental", c.mains_fundamental);
  c.highpass_cutoff = n.positive("highpass_cutoff", c.highpass_cutoff);
  c.highpass_order = static_cast<int>(n.integer("highpass_order", c.highpass_order, 1, 8));
  c.tracked_harmonics = n.numbers("tracked_harmonics", c.tracked_harmonics);
  c.tracking_window = n.positive("tracking_window", c.tracking_window);
  c.phase_offsets = n.numbers("phase_offsets", c.phase_offsets);
  if (n.has("subtraction_passes")) {
    c.subtraction_passes.clear();
    for (double v : n.numbers("subtraction_passes", {})) {
      if (v != std::floor(v) || v < 0.0 || v > 16.0) {
        n.fail(n.at("subtraction_passes"), "entries must be integers in [0, 16]");
        break;
      }
      c.subtraction_passes.push_back(static_cast<int>(v));
    }
  }
  c.notch_centers = n.numbers("notch_centers", c.notch_centers);
  c.notch_bandwidth = n.positive("notch_bandwidth", c.notch_bandwidth);
  c.lowpass_cutoff = n.positive("lowpass_cutoff", c.lowpass_cutoff);
  c.lowpass_order = static_cast<int>(n.integer("lowpass_order", c.lowpass_order, 1, 8));
}

// Sample rate from a record file's metadata line, without reading the samples.
std::optional<double> record_sample_rate(const std::filesystem::path& path) {
  std::ifstream is(path);
  std::string line;
  if (!is || !std::getline(is, line)) return std::nullopt;
  const std::string key = "sample_rate_hz=";
  const auto pos = line.find(key);
  if (line.rfind("#", 0) != 0 || pos == std::string::npos) return std::nullopt;
  const char* first = line.data() + pos + key.size();
  double rate = 0.0;
  const auto res = std::from_chars(first, line.data() + line.size(), rate);
  if (res.ec != std::errc() || !(rate > 0.0)) return std::nullopt;
  return rate;
}

void parse_filter(const Node& n, FilterParamsBlock& p, const std::filesystem::path& base) {
  n.allow({"record", "reference", "chain", "asd_segment_seconds", "band", "notch_exclusion",
           "probe_frequency", "probe_amplitude", "expected_floor"});
  if (auto r = input_path(n, "record", base, true)) p.record = *r;
  if (auto r = input_path(n, "reference", base, true)) p.reference = *r;
  const Node chain = n.child("chain");
  const auto before = chain.diagnostic_count();
  parse_chain(chain, p.chain);
  if (chain.diagnostic_count() == before && !p.record.empty()) {
    if (const auto rate = record_sample_rate(p.record)) {
      try {
        p.chain.validate(*rate);
      } catch (const std::exception& e) {
        chain.fail(chain.path(), e.what());
      }
    } else {
      n.fail(n.at("record"), "missing or malformed '# sample_rate_hz=' header");
    }
  }
  p.asd_segment_seconds = n.positive("asd_segment_seconds", p.asd_segment_seconds);
  p.band = parse_band(n, "band", p.band);
  p.notch_exclusion = n.non_negative("notch_exclusion", p.notch_exclusion);
  p.probe_frequency = n.positive("probe_frequency", p.probe_frequency);
  if (n.has("probe_amplitude")) p.probe_amplitude = n.positive("probe_amplitude", 1.0);
  if (n.has("expected_floor")) p.expected_floor = n.positive("expected_floor", 1.0);
}

void parse_odmr(const Node& n, OdmrParams& p) {
  n.allow({"model", "drive", "span", "points", "photon_budget", "averaging_repeats", "probe_field",
           "calibration"});
  p.model = parse_model(n.child("model"), p.model);
  p.drive = parse_drive(n.child("drive"), p.drive);
  p.span = n.non_negative("span", p.span);
  p.points = static_cast<int>(n.integer("points", p.points, 3, 1000000));
  const Node b = n.child("photon_budget");
  b.allow({"detected_optical_power", "mean_photon_wavelength"});
  p.budget.detected_optical_power = b.positive("detected_optical_power", p.budget.detected_optical_power);
  p.budget.mean_photon_wavelength = b.positive("mean_photon_wavelength", p.budget.mean_photon_wavelength);
  p.averaging_repeats = static_cast<int>(n.integer("averaging_repeats", p.averaging_repeats, 1));
  p.probe_field = n.number("probe_field", p.probe_field);
  p.calibration = n.positive("calibration", p.calibration);
}

void parse_pulsed(const Node& n, PulsedParams& p) {
  n.allow({"sequence", "readout", "rabi", "powers", "sample_rate", "noise_std", "repetitions",
           "pi_scan_range"});
  {
    const Node s = n.child("sequence");
    const auto before = s.diagnostic_count();
    s.allow({"init_duration", "mw_duration", "readout_duration", "n_readouts_per_cycle"});
    p.sequence.init_duration = s.positive("init_duration", p.sequence.init_duration);
    p.sequence.mw_duration = s.positive("mw_duration", p.sequence.mw_duration);
    p.sequence.readout_duration = s.positive("readout_duration", p.sequence.readout_duration);
    p.sequence.n_readouts_per_cycle =
        static_cast<int>(s.integer("n_readouts_per_cycle", p.sequence.n_readouts_per_cycle, 1, 3));
    if (s.present()) check_invariants(s, before, p.sequence);
  }
  {
    const Node r = n.child("readout");
    const auto before = r.diagnostic_count();
    r.allow({"delta_v0", "decay_time_at_powers", "intensity"});
    p.readout.delta_v0 = r.positive("delta_v0", p.readout.delta_v0);
    p.readout.intensity = r.positive("intensity", p.readout.intensity);
    if (const json* m = r.raw("decay_time_at_powers")) {
      const auto path = r.at("decay_time_at_powers");
      bool good = m->is_array() && !m->empty();
      std::map<double, double> map;
      if (good) {
        for (const auto& e : *m) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            good = false;
            break;
          }
          map[e[0].get<double>()] = e[1].get<double>();
        }
      }
      if (!good) r.fail(path, "must be a non-empty array of [power_w, decay_time_s] pairs");
      else p.readout.decay_time_at_powers = map;
    }
    if (r.present()) check_invariants(r, before, p.readout);
  }
  {
    const Node r = n.child("rabi");
    r.allow({"pi_time", "rabi_decay"});
    p.rabi.pi_time = r.positive("pi_time", p.rabi.pi_time);
    // null or absent: undamped
    if (r.has("rabi_decay") && !r.raw("rabi_decay")->is_null())
      p.rabi.rabi_decay = r.positive("rabi_decay", p.rabi.rabi_decay);
  }
  p.powers = n.numbers("powers", p.powers);
  if (p.powers.empty()) n.fail(n.at("powers"), "must not be empty");
  for (double w : p.powers)
    if (!(w > 0.0)) {
      n.fail(n.at("powers"), "entries must be > 0");
      break;
    }
  p.sample_rate = n.positive("sample_rate", p.sample_rate);
  p.noise_std = n.non_negative("noise_std", p.noise_std);
  p.repetitions = static_cast<int>(n.integer("repetitions", p.repetitions, 1, 1000000));
  p.pi_scan_range = n.non_negative("pi_scan_range", p.pi_scan_range);
  if (p.pi_scan_range > 0.0 && p.pi_scan_range < 2.0 * p.rabi.pi_time)
    n.fail(n.at("pi_scan_range"), "must cover at least 2 pi_time");
}

void parse_widefield(const Node& n, WidefieldParams& p) {
  n.allow({"imaging", "width", "height", "region_offset", "region_size", "frames", "frame_rate",
           "jitter_sigma", "vibration_amplitude", "dip_contrast"});
  {
    const Node im = n.child("imaging");
    const auto before = im.diagnostic_count();
    im.allow({"fov_x", "fov_y", "pixel_area", "bit_depth", "total_fluorescence", "model"});
    auto& c = p.imaging;
    c.fov_x = im.positive("fov_x", c.fov_x);
    c.fov_y = im.positive("fov_y", c.fov_y);
    c.pixel_area = im.positive("pixel_area", c.pixel_area);
    c.bit_depth = static_cast<int>(im.integer("bit_depth", c.bit_depth, 1, 16));
    if (im.has("bit_depth") && c.bit_depth != 8 && c.bit_depth != 10 && c.bit_depth != 12 && c.bit_depth != 16)
      im.fail(im.at("bit_depth"), "must be one of 8, 10, 12, 16");
    c.total_fluorescence = im.positive("total_fluorescence", c.total_fluorescence);
    c.model = parse_model(im.child("model"), c.model);
    if (im.present()) check_invariants(im, before, c);
  }
  p.width = static_cast<std::size_t>(n.integer("width", static_cast<long long>(p.width), 2, 8192));
  p.height = static_cast<std::size_t>(n.integer("height", static_cast<long long>(p.height), 2, 8192));
  p.region_offset = n.non_negative("region_offset", p.region_offset);
  p.region_size = static_cast<std::size_t>(n.integer("region_size", static_cast<long long>(p.region_size), 1, 8192));
  if (2 * p.region_size > p.width || p.region_size > p.height)
    n.fail(n.at("region_size"), "two regions side by side must fit in width x height");
  p.frames = static_cast<int>(n.integer("frames", p.frames, 1, 100000));
  p.frame_rate = n.positive("frame_rate", p.frame_rate);
  p.jitter_sigma = n.non_negative("jitter_sigma", p.jitter_sigma);
  p.vibration_amplitude = n.non_negative("vibration_amplitude", p.vibration_amplitude);
  p.dip_contrast = n.number("dip_contrast", p.dip_contrast);
  if (!(p.dip_contrast > 0.0 && p.dip_contrast < 1.0)) n.fail(n.at("dip_contrast"), "must be in (0, 1)");
}

void parse_report(const Node& n, ReportParams& p, const std::filesystem::path& base) {
  n.allow({"asd_before", "asd_after", "records", "band", "overlay_band", "segment_seconds"});
  p.asd_before = input_path(n, "asd_before", base, false);
  p.asd_after = input_path(n, "asd_after", base, false);
  if (const json* r = n.raw("records")) {
    if (!r->is_array()) {
      n.fail(n.at("records"), "must be an array of paths");
    } else {
      for (std::size_t i = 0; i < r->size(); ++i) {
        const std::string path = n.at("records") + "[" + std::to_string(i) + "]";
        if (!(*r)[i].is_string()) {
          n.fail(path, "must be a string");
          continue;
        }
        auto resolved = resolve(base, (*r)[i].get<std::string>());
        std::error_code ec;
        if (!std::filesystem::is_regular_file(resolved, ec)) n.fail(path, "file not found: " + resolved.string());
        p.records.push_back(resolved);
      }
    }
  }
  p.band = parse_band(n, "band", p.band);
  p.overlay_band = parse_band(n, "overlay_band", p.overlay_band);
  p.segment_seconds = n.non_negative("segment_seconds", p.segment_seconds);
  if (!p.asd_before && !p.asd_after && p.records.empty())
    n.fail(n.path(), "needs at least one of asd_before, asd_after, records");
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::simulate: return "simulate";
    case Scenario::filter: return "filter";
    case Scenario::odmr: return "odmr";
    case Scenario::pulsed: return "pulsed";
    case Scenario::widefield: return "widefield";
    case Scenario::report: return "report";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (Scenario s : kAllScenarios)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

bool is_stochastic(Scenario s) {
  return s == Scenario::simulate || s == Scenario::pulsed || s == Scenario::widefield;
}

LoadResult parse_config(std::string_view json_text, const std::filesystem::path& base_dir,
                        const Overrides& overrides) {
  LoadResult result;
  auto& diags = result.diagnostics;
  RunConfig& cfg = result.config;

  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    diags.push_back({"", std::string("invalid JSON: ") + e.what()});
    return result;
  }
  if (!doc.is_object()) {
    diags.push_back({"", "top level must be an object"});
    return result;
  }

  const Node root(&doc, "", diags);
  std::vector<std::string_view> allowed{"scenario", "rng_seed", "output_dir"};
  for (Scenario s : kAllScenarios) allowed.push_back(to_string(s));
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == it.key();
    if (!ok) diags.push_back({it.key(), "unknown field"});
  }

  std::optional<Scenario> scenario = overrides.scenario;
  if (const auto name = root.string("scenario")) {
    const auto parsed = parse_scenario(*name);
    if (!parsed) diags.push_back({"scenario", "unknown scenario '" + *name + "'"});
    else if (scenario && *scenario != *parsed)
      diags.push_back({"scenario", "file says '" + *name + "' but '" + std::string(to_string(*scenario)) +
                                       "' was requested"});
    else scenario = parsed;
  } else if (!scenario && !root.has("scenario")) {
    diags.push_back({"scenario", "required"});
  }
  if (!scenario) return result;
  cfg.scenario = *scenario;

  if (doc.contains("rng_seed")) {
    const json& s = doc["rng_seed"];
    if (s.is_number_unsigned()) cfg.rng_seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<long long>() >= 0) cfg.rng_seed = static_cast<std::uint64_t>(s.get<long long>());
    else diags.push_back({"rng_seed", "must be a non-negative integer"});
  }
  if (overrides.seed) cfg.rng_seed = overrides.seed;
  if (is_stochastic(cfg.scenario) && !cfg.rng_seed)
    diags.push_back({"rng_seed", "required for the stochastic scenario '" + std::string(to_string(cfg.scenario)) +
                                     "' (set it in the file or pass --seed)"});

  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  else if (const auto out = root.string("output_dir")) cfg.output_dir = resolve(base_dir, *out);
  else cfg.output_dir = base_dir / "out" / std::string(to_string(cfg.scenario));

  const std::string block(to_string(cfg.scenario));
  const Node n = root.child(block);
  if (!n.present() && cfg.scenario != Scenario::simulate && cfg.scenario != Scenario::odmr &&
      cfg.scenario != Scenario::pulsed && cfg.scenario != Scenario::widefield) {
    diags.push_back({block, "required"});
    return result;
  }
  for (Scenario s : kAllScenarios)
    if (s != cfg.scenario && doc.contains(to_string(s)))
      diags.push_back({std::string(to_string(s)), "block does not belong to scenario '" + block + "'"});

  switch (cfg.scenario) {
    case Scenario::simulate: parse_simulate(n, cfg.simulate, diags); break;
    case Scenario::filter: parse_filter(n, cfg.filter, base_dir); break;
    case Scenario::odmr: parse_odmr(n, cfg.odmr); break;
    case Scenario::pulsed: parse_pulsed(n, cfg.pulsed); break;
    case Scenario::widefield: parse_widefield(n, cfg.widefield); break;
    case Scenario::report: parse_report(n, cfg.report, base_dir); break;
  }
  if (cfg.rng_seed) cfg.simulate.environment.rng_seed = *cfg.rng_seed;
  return result;
}

LoadResult load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream is(path);
  if (!is) {
    LoadResult r;
    r.diagnostics.push_back({"", "cannot read config file: " + path.string()});
    return r;
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base, overrides);
}

}  // namespace nvmag::cli
