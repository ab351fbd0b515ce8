#include "cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "cli/svg.hpp"
#include "nvmag/errors.hpp"
#include "nvmag/record_io.hpp"

namespace nvmag::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  fs::path add(const std::string& name) {
    written_.push_back(dir_ / name);
    return written_.back();
  }
  void summary(const json& j) {
    std::ofstream os(add("summary.json"), std::ios::trunc);
    if (!os) throw IoError("cannot write summary.json in " + dir_.string());
    os << j.dump(2) << '\n';
  }
  std::vector<fs::path> done() && { return std::move(written_); }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::string indexed(const std::string& stem, std::size_t i, std::size_t count) {
  if (count == 1) return stem + ".csv";
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu.csv", i);
  return stem + buf;
}

double db(double ratio) { return 20.0 * std::log10(ratio); }

std::size_t segment_samples(double seconds, const Timeseries& ts) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * ts.sample_rate));
  return std::clamp<std::size_t>(n, 2, ts.size());
}

// ---------------------------------------------------------------- simulate

std::vector<fs::path> run_simulate(const RunConfig& cfg) {
  const auto& p = cfg.simulate;
  Outputs out(cfg.output_dir);
  json summary;
  summary["scenario"] = "simulate";
  summary["sample_rate_hz"] = p.sample_rate;
  summary["duration_s"] = p.duration;
  summary["samples"] = sample_count(p.sample_rate, p.duration);
  json records = json::array();

  for (int i = 0; i < p.records; ++i) {
    NoiseEnvironment env = p.environment;
    env.rng_seed = *cfg.rng_seed + static_cast<std::uint64_t>(i);
    std::vector<Timeseries> parts{gen_environment(env, p.sample_rate, p.duration)};
    for (const auto& s : p.signals) parts.push_back(gen_test_signal(s, p.sample_rate, p.duration));
    const Timeseries record = compose(parts);
    const Timeseries reference = gen_mains_reference(env, p.sample_rate, p.duration);

    const auto n = static_cast<std::size_t>(p.records);
    io::write_record(out.add(indexed("record", static_cast<std::size_t>(i), n)), {record, env.rng_seed});
    io::write_record(out.add(indexed("reference", static_cast<std::size_t>(i), n)), {reference, env.rng_seed});

    json r;
    r["seed"] = env.rng_seed;
    r["rms"] = rms(record);
    if (env.white_floor > 0.0 && record.size() >= 4) {
      const Spectrum s = asd(record, segment_samples(1.0, record));
      json peaks;
      for (const auto& [k, amplitude] : env.harmonic_amplitudes) {
        const double f = k * env.mains_fundamental;
        if (amplitude > 0.0 && f < p.sample_rate / 2.0)
          peaks[std::to_string(k)] = db(peak_density(s, f, 1.0) / env.white_floor);
      }
      r["mains_peak_above_floor_db"] = peaks;
    }
    records.push_back(r);
  }
  summary["records"] = records;
  out.summary(summary);
  return std::move(out).done();
}

// ---------------------------------------------------------------- filter

std::vector<fs::path> run_filter(const RunConfig& cfg) {
  const auto& p = cfg.filter;
  const io::RecordFile input = io::read_record(p.record);
  const io::RecordFile reference = io::read_record(p.reference);
  const Timeseries& x = input.record;
  if (reference.record.size() != x.size() || reference.record.sample_rate != x.sample_rate)
    throw CompositionError("filter: record and reference differ in length or sample rate");

  const PipelineStages st = run_pipeline_stages(x, reference.record, p.chain);
  Outputs out(cfg.output_dir);
  io::write_record(out.add("filtered.csv"), {st.output, input.seed});

  const std::size_t seg = segment_samples(p.asd_segment_seconds, x);
  const Spectrum before = asd(x, seg), hp = asd(st.highpassed, seg), sub = asd(st.subtracted, seg),
                 notched = asd(st.notched, seg), after = asd(st.output, seg);
  io::write_spectrum(out.add("asd_before.csv"), before);
  io::write_spectrum(out.add("asd_highpassed.csv"), hp);
  io::write_spectrum(out.add("asd_subtracted.csv"), sub);
  io::write_spectrum(out.add("asd_notched.csv"), notched);
  io::write_spectrum(out.add("asd_after.csv"), after);

  std::vector<Band> excluded;
  for (double c : p.chain.notch_centers) excluded.push_back({c - p.notch_exclusion, c + p.notch_exclusion});

  json summary;
  summary["scenario"] = "filter";
  summary["samples"] = x.size();
  summary["sample_rate_hz"] = x.sample_rate;
  summary["asd_segment_samples"] = seg;
  summary["band_hz"] = {p.band.lo, p.band.hi};
  json medians;
  medians["before"] = band_median(before, p.band, excluded);
  medians["highpassed"] = band_median(hp, p.band, excluded);
  medians["subtracted"] = band_median(sub, p.band, excluded);
  medians["notched"] = band_median(notched, p.band, excluded);
  medians["after"] = band_median(after, p.band, excluded);
  summary["band_median_asd"] = medians;
  if (p.expected_floor) {
    summary["expected_floor"] = *p.expected_floor;
    summary["after_vs_floor_db"] = db(medians["after"].get<double>() / *p.expected_floor);
  }

  // Harmonic suppression on a finer grid than the band estimate.
  const std::size_t fine = segment_samples(10.0, x);
  const Spectrum hp_fine = asd(st.highpassed, fine), sub_fine = asd(st.subtracted, fine),
                 out_fine = asd(st.output, fine);
  json harmonics = json::array();
  for (double f : p.chain.tracked_harmonics) {
    if (f >= x.sample_rate / 2.0) continue;
    json h;
    h["frequency_hz"] = f;
    h["subtraction_reduction_db"] = db(peak_density(hp_fine, f, 0.5) / peak_density(sub_fine, f, 0.5));
    h["total_reduction_db"] = db(peak_density(hp_fine, f, 0.5) / peak_density(out_fine, f, 0.5));
    harmonics.push_back(h);
  }
  summary["harmonics"] = harmonics;

  const ToneFit in_tone = fit_tone(x, p.probe_frequency);
  const ToneFit out_tone = fit_tone(st.output, p.probe_frequency);
  double shift = out_tone.phase - in_tone.phase;
  shift = std::remainder(shift, 2.0 * std::numbers::pi);
  json probe;
  probe["frequency_hz"] = p.probe_frequency;
  probe["amplitude_before"] = in_tone.amplitude;
  probe["amplitude_after"] = out_tone.amplitude;
  if (p.probe_amplitude) probe["recovered_fraction"] = out_tone.amplitude / *p.probe_amplitude;
  probe["phase_shift_rad"] = shift;
  probe["delay_samples"] = shift / (2.0 * std::numbers::pi * p.probe_frequency) * x.sample_rate;
  summary["probe"] = probe;
  out.summary(summary);
  return std::move(out).done();
}

// ---------------------------------------------------------------- odmr

std::vector<fs::path> run_odmr(const RunConfig& cfg) {
  const auto& p = cfg.odmr;
  const OdmrModel& m = p.model;
  m.validate();
  const double span = p.span > 0.0 ? p.span
                                   : (m.n_hyperfine_lines - 1) * m.hyperfine_spacing + 10.0 * m.fwhm;
  std::vector<double> grid(static_cast<std::size_t>(p.points));
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = m.resonance_center() - span / 2.0 + span * static_cast<double>(i) / static_cast<double>(grid.size() - 1);

  Outputs out(cfg.output_dir);
  std::vector<std::vector<double>> rows;
  for (double f : grid) rows.push_back({f, lineshape(m, f), lineshape_slope(m, f)});
  io::write_table(out.add("lineshape.csv"), {"frequency_hz", "fluorescence", "slope_per_hz"}, rows);

  const DemodCurve curve = sweep_demod(m, p.drive, grid);
  rows.clear();
  for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], curve.demod_values[i]});
  io::write_table(out.add("demod.csv"), {"carrier_hz", "demod"}, rows);

  json summary;
  summary["scenario"] = "odmr";
  summary["resonance_center_hz"] = m.resonance_center();
  summary["total_contrast"] = m.total_contrast();
  summary["zeeman_shift_hz_per_nt"] = zeeman_shift(m, 1e-9);
  if (m.contrast_per_line > 0.0) {
    const Setpoint sp = max_slope_setpoint(m);
    summary["max_slope_setpoint_hz"] = sp.frequency;
    summary["max_slope_per_hz"] = sp.slope;
    const double tracked = track_setpoint(curve);
    summary["tracked_setpoint_hz"] = tracked;
    FmDriveConfig at = p.drive;
    at.carrier_frequency = tracked;
    summary["demod_slope_per_hz"] = demod_slope(m, at);
    summary["probe_field_t"] = p.probe_field;
    summary["probe_voltage_small_signal"] = field_to_voltage(m, at, p.calibration, p.probe_field);
    summary["probe_voltage_simulated"] = simulated_voltage(m, at, p.calibration, p.probe_field);
    const double s = cw_shot_noise_sensitivity(m, p.budget);
    summary["photon_rate_per_s"] = p.budget.detection_rate();
    summary["cw_sensitivity_t_per_rthz"] = s;
    summary["averaging_repeats"] = p.averaging_repeats;
    summary["averaged_sensitivity_t_per_rthz"] = s / averaging_gain(static_cast<std::size_t>(p.averaging_repeats));
  }
  out.summary(summary);
  return std::move(out).done();
}

// ---------------------------------------------------------------- pulsed

std::vector<fs::path> run_pulsed(const RunConfig& cfg) {
  const auto& p = cfg.pulsed;
  Outputs out(cfg.output_dir);
  json summary;
  summary["scenario"] = "pulsed";

  std::vector<std::vector<double>> fit_rows;
  std::vector<double> fit_power_mw, fit_tau_ms;
  json fits = json::array();
  // Shot-to-shot noise averages down over the repetitions.
  const double trace_noise = p.noise_std / std::sqrt(static_cast<double>(p.repetitions));
  for (std::size_t i = 0; i < p.powers.size(); ++i) {
    const double power = p.powers[i];
    const ReadoutTrace trace = simulate_readout_trace(p.readout, p.sequence, p.rabi, power, p.sample_rate,
                                                      p.noise_std, p.repetitions, *cfg.rng_seed + i);
    const ReadoutDifference truth = readout_difference(p.readout, 0.0, power);
    json f;
    f["power_w"] = power;
    f["model_decay_time_s"] = truth.decay_time;
    f["clamped"] = truth.clamped;
    std::vector<std::vector<double>> rows;
    try {
      const ExponentialFit fit = fit_exponential(trace.times, trace.values, trace_noise);
      f["amplitude_v"] = fit.amplitude;
      f["decay_time_s"] = fit.decay_time;
      f["amplitude_error_v"] = fit.amplitude_error;
      f["decay_time_error_s"] = fit.decay_time_error;
      fit_rows.push_back({power, truth.decay_time, fit.amplitude, fit.decay_time, fit.amplitude_error,
                          fit.decay_time_error});
      fit_power_mw.push_back(power * 1e3);
      fit_tau_ms.push_back(fit.decay_time * 1e3);
      for (std::size_t k = 0; k < trace.times.size(); ++k)
        rows.push_back({trace.times[k], trace.values[k],
                        fit.amplitude * std::exp(-trace.times[k] / fit.decay_time)});
    } catch (const FitError& e) {
      f["fit_failed"] = e.what();
      for (std::size_t k = 0; k < trace.times.size(); ++k) rows.push_back({trace.times[k], trace.values[k], 0.0});
    }
    io::write_table(out.add(indexed("trace", i, p.powers.size())), {"time_s", "volts", "fit_volts"}, rows);
    fits.push_back(f);
  }
  io::write_table(out.add("fits.csv"),
                  {"power_w", "model_decay_time_s", "amplitude_v", "decay_time_s", "amplitude_error_v",
                   "decay_time_error_s"},
                  fit_rows);
  summary["fits"] = fits;
  if (fit_power_mw.size() >= 2 && fit_power_mw.front() != fit_power_mw.back()) {
    const LinearFit lf = fit_linear(fit_power_mw, fit_tau_ms);
    summary["decay_vs_power"] = {{"slope_ms_per_mw", lf.slope}, {"intercept_ms", lf.intercept}};
    summary["decay_reduction_s"] = (fit_tau_ms.front() - fit_tau_ms.back()) * 1e-3;
  }
  const double first = p.powers.front(), last = p.powers.back();
  summary["model_decay_reduction_s"] =
      decay_time(p.readout, first).seconds - decay_time(p.readout, last).seconds;

  const double range = p.pi_scan_range > 0.0 ? p.pi_scan_range : 3.0 * p.rabi.pi_time;
  std::vector<std::vector<double>> rabi_rows;
  for (int k = 0; k <= 600; ++k) {
    const double tau = range * k / 600.0;
    rabi_rows.push_back({tau, rabi_contrast(p.rabi, tau)});
  }
  io::write_table(out.add("rabi.csv"), {"tau_s", "contrast"}, rabi_rows);
  summary["optimal_pi_time_s"] = optimal_pi_time(p.rabi, range);

  json bw;
  for (int n = 1; n <= 3; ++n) bw[std::to_string(n)] = sensing_bandwidth(n);
  summary["sensing_bandwidth_hz"] = bw;
  summary["sequence_bandwidth_hz"] = sensing_bandwidth(p.sequence.n_readouts_per_cycle);
  out.summary(summary);
  return std::move(out).done();
}

// ---------------------------------------------------------------- widefield

ImageU16 to_pgm(const ImageD& img, int bits) { return quantize_frame(img, bits); }

double max_row_gradient(const ImageD& img, std::size_t row) {
  double g = 0.0;
  for (std::size_t x = 1; x < img.width; ++x) g = std::max(g, std::abs(img.at(x, row) - img.at(x - 1, row)));
  return g;
}

std::vector<fs::path> run_widefield(const RunConfig& cfg) {
  const auto& p = cfg.widefield;
  const ImagingConfig& ic = p.imaging;
  ic.validate();
  const int levels_max = (1 << ic.bit_depth) - 1;
  Outputs out(cfg.output_dir);
  json summary;
  summary["scenario"] = "widefield";
  summary["n_pixels"] = ic.n_pixels();
  summary["per_pixel_sensitivity_t_per_rthz"] = per_pixel_sensitivity(ic);
  summary["array_sensitivity_t_per_rthz"] = array_sensitivity(ic);

  // Microwave gradient: left half offset by -region_offset, right half by +.
  ArtifactScene scene;
  scene.resonance_offset_map = ImageD(p.width, p.height);
  for (std::size_t y = 0; y < p.height; ++y)
    for (std::size_t x = 0; x < p.width; ++x)
      scene.resonance_offset_map.at(x, y) = x < p.width / 2 ? -p.region_offset : p.region_offset;
  const Setpoint sp = max_slope_setpoint(ic.model);
  const ImageD gradient = mw_gradient_contrast_map(ic, scene, sp.frequency);
  io::write_pgm(out.add("mw_gradient.pgm"), to_pgm(gradient, ic.bit_depth), static_cast<std::uint16_t>(levels_max));

  const std::size_t rs = p.region_size;
  const std::size_t ax = (p.width / 2 - rs) / 2, bx = p.width / 2 + ax, ry = (p.height - rs) / 2;
  std::vector<std::vector<double>> rows;
  double min_a = 2.0, min_b = 2.0, f_a = 0.0, f_b = 0.0;
  const double center = ic.model.resonance_center();
  const double half = 3.0 * ic.model.fwhm + p.region_offset;
  for (int k = 0; k <= 400; ++k) {
    const double f = center - half + 2.0 * half * k / 400.0;
    const ImageD frame = mw_gradient_contrast_map(ic, scene, f);
    const double a = region_mean(frame, ax, ry, rs, rs), b = region_mean(frame, bx, ry, rs, rs);
    rows.push_back({f, a, b});
    if (a < min_a) min_a = a, f_a = f;
    if (b < min_b) min_b = b, f_b = f;
  }
  io::write_table(out.add("regions.csv"), {"frequency_hz", "region_a", "region_b"}, rows);
  summary["drive_frequency_hz"] = sp.frequency;
  summary["region_a_dip_hz"] = f_a;
  summary["region_b_dip_hz"] = f_b;
  summary["region_dip_separation_hz"] = f_b - f_a;

  // Digitisation levels spanned by a dip of dip_contrast.
  json levels;
  for (int bits : {8, 10, 12, 16}) {
    ImageD frame(2, 1, 1.0);
    frame.at(1, 0) = 1.0 - p.dip_contrast;
    const ImageU16 q = quantize_frame(frame, bits);
    levels[std::to_string(bits)] = static_cast<int>(q.at(0, 0)) - static_cast<int>(q.at(1, 0));
  }
  summary["dip_levels_by_bit_depth"] = levels;

  // Sharp-edged square averaged under jitter.
  ImageD pattern(p.width, p.height, 0.2);
  for (std::size_t y = p.height / 4; y < 3 * p.height / 4; ++y)
    for (std::size_t x = p.width / 4; x < 3 * p.width / 4; ++x) pattern.at(x, y) = 0.8;
  std::vector<ImageD> stack(static_cast<std::size_t>(p.frames), pattern);
  ArtifactScene jitter;
  jitter.displacement_series = gaussian_jitter(stack.size(), p.jitter_sigma, *cfg.rng_seed);
  const ImageD averaged = jitter_average(stack, jitter);
  io::write_pgm(out.add("pattern.pgm"), to_pgm(pattern, ic.bit_depth), static_cast<std::uint16_t>(levels_max));
  io::write_pgm(out.add("jitter_average.pgm"), to_pgm(averaged, ic.bit_depth), static_cast<std::uint16_t>(levels_max));
  summary["edge_gradient_sharp"] = max_row_gradient(pattern, p.height / 2);
  summary["edge_gradient_jittered"] = max_row_gradient(averaged, p.height / 2);

  // Vibration: trace of a pixel on the square's left edge.
  const auto shifts = vibration(stack.size(), p.frame_rate, jitter.vibration_frequency, p.vibration_amplitude);
  const std::size_t ex = p.width / 4, ey = p.height / 2;
  Timeseries trace(p.frame_rate, std::vector<double>(stack.size()), Unit::dimensionless);
  rows.clear();
  for (std::size_t k = 0; k < stack.size(); ++k) {
    trace.samples[k] = shift_frame(pattern, shifts[k]).at(ex, ey);
    rows.push_back({trace.time(k), trace.samples[k]});
  }
  io::write_table(out.add("vibration_trace.csv"), {"time_s", "value"}, rows);
  if (trace.size() >= 4) {
    const Spectrum s = asd(trace, trace.size());
    std::size_t best = 1;
    for (std::size_t k = 1; k < s.density.size(); ++k)
      if (s.density[k] > s.density[best]) best = k;
    summary["vibration_dominant_hz"] = s.frequencies[best];
  }
  out.summary(summary);
  return std::move(out).done();
}

// ---------------------------------------------------------------- report

std::vector<fs::path> run_report(const RunConfig& cfg) {
  const auto& p = cfg.report;
  Outputs out(cfg.output_dir);
  json summary;
  summary["scenario"] = "report";

  if (p.asd_before || p.asd_after) {
    svg::LinePlot plot;
    plot.title = "Amplitude spectral density";
    plot.x_label = "frequency (Hz)";
    plot.y_label = "ASD (unit/sqrt(Hz))";
    plot.log_y = true;
    plot.x_min = p.overlay_band.lo;
    plot.x_max = p.overlay_band.hi;
    if (p.asd_before) {
      const Spectrum s = io::read_spectrum(*p.asd_before);
      plot.series.push_back({"before", s.frequencies, s.density, "#999999"});
    }
    if (p.asd_after) {
      const Spectrum s = io::read_spectrum(*p.asd_after);
      plot.series.push_back({"after", s.frequencies, s.density, "#1f5fbf"});
    }
    svg::write(out.add("asd_overlay.svg"), svg::render(plot));
  }

  if (!p.records.empty()) {
    std::vector<Timeseries> records;
    for (const auto& path : p.records) records.push_back(io::read_record(path).record);
    const std::size_t seg =
        p.segment_seconds > 0.0 ? segment_samples(p.segment_seconds, records.front()) : 0;
    const Spectrogram sg = spectrogram(records, p.band, seg);

    std::vector<std::string> header{"frequency_hz"};
    for (std::size_t r = 0; r < sg.rows.size(); ++r) header.push_back("row_" + std::to_string(r));
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < sg.frequencies.size(); ++k) {
      std::vector<double> row{sg.frequencies[k]};
      for (const auto& r : sg.rows) row.push_back(r[k]);
      rows.push_back(std::move(row));
    }
    io::write_table(out.add("spectrogram.csv"), header, rows);

    svg::Heatmap map;
    map.title = "Normalised spectrogram";
    map.x_label = "frequency (Hz)";
    map.y_label = "record";
    map.x = sg.frequencies;
    map.rows = sg.rows;
    svg::write(out.add("spectrogram.svg"), svg::render(map));

    json widths = json::array();
    for (const auto& r : sg.rows) {
      Spectrum s{sg.frequencies, r};
      const std::size_t peak =
          static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
      widths.push_back({{"peak_hz", s.frequencies[peak]}, {"width_20db_hz", peak_width(s, s.frequencies[peak], 0.0)}});
    }
    summary["rows"] = widths;
  }
  out.summary(summary);
  return std::move(out).done();
}

}  // namespace

std::vector<fs::path> run(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::simulate: return run_simulate(cfg);
    case Scenario::filter: return run_filter(cfg);
    case Scenario::odmr: return run_odmr(cfg);
    case Scenario::pulsed: return run_pulsed(cfg);
    case Scenario::widefield: return run_widefield(cfg);
    case Scenario::report: return run_report(cfg);
  }
  return {};
}

}  // namespace nvmag::cli
