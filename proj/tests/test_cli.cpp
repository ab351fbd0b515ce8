#ifdef NVMAG_HAVE_CLI

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/runner.hpp"
#include "cli/svg.hpp"
#include "nvmag/record_io.hpp"

using namespace nvmag;
using namespace nvmag::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path;
  explicit Scratch(const std::string& name) : path(fs::temp_directory_path() / ("nvmag_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

bool has_diagnostic(const LoadResult& r, const std::string& path, const std::string& fragment = "") {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const Diagnostic& d) {
    return d.path == path && d.message.find(fragment) != std::string::npos;
  });
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

// Tag balance check: every opened element is closed in order.
bool well_formed(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = doc.find('<', pos)) != std::string::npos) {
    const std::size_t end = doc.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = doc.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    const auto name_end = tag.find_first_of(" \t\n");
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else {
      stack.push_back(tag.substr(0, name_end));
    }
  }
  return stack.empty();
}

const char* kSmallSimulate = R"({
  "scenario": "simulate", "rng_seed": 4,
  "simulate": {
    "sample_rate": 2000, "duration": 2,
    "environment": {"harmonic_amplitudes": {"1": 3e-7}, "phase_walk_sigma": 0.1, "white_floor": 1.5e-10},
    "test_signals": [{"kind": "tone", "frequency": 111, "amplitude": 1e-9}]
  }
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("scenario names round-trip") {
  for (const char* name : {"simulate", "filter", "odmr", "pulsed", "widefield", "report"}) {
    const auto s = parse_scenario(name);
    REQUIRE(s.has_value());
    CHECK(to_string(*s) == name);
  }
  CHECK_FALSE(parse_scenario("validate").has_value());
  CHECK(is_stochastic(Scenario::simulate));
  CHECK_FALSE(is_stochastic(Scenario::odmr));
}

TEST_CASE("diagnostics carry dotted paths") {
  const LoadResult r = parse_config(R"({"scenario": "odmr", "odmr": {"model": {"fwhm": -1}}})", ".");
  CHECK_FALSE(r.ok());
  CHECK(has_diagnostic(r, "odmr.model.fwhm"));

  const LoadResult unknown = parse_config(R"({"scenario": "odmr", "odmr": {"modle": {}}, "extra": 1})", ".");
  CHECK(has_diagnostic(unknown, "odmr.modle", "unknown field"));
  CHECK(has_diagnostic(unknown, "extra", "unknown field"));

  const LoadResult foreign = parse_config(R"({"scenario": "odmr", "pulsed": {}})", ".");
  CHECK(has_diagnostic(foreign, "pulsed"));

  CHECK(has_diagnostic(parse_config("{not json", "."), ""));
  CHECK(has_diagnostic(parse_config("[1, 2]", "."), ""));
  CHECK(has_diagnostic(parse_config("{}", "."), "scenario", "required"));
  CHECK(has_diagnostic(parse_config(R"({"scenario": "warp"})", "."), "scenario", "unknown scenario"));
}

TEST_CASE("stochastic scenarios need a seed from the file or the command line") {
  const char* text = R"({"scenario": "simulate", "simulate": {"duration": 1, "sample_rate": 1000}})";
  CHECK(has_diagnostic(parse_config(text, "."), "rng_seed", "required"));
  Overrides o;
  o.seed = 9;
  const LoadResult r = parse_config(text, ".", o);
  CHECK(r.ok());
  CHECK(r.config.rng_seed == 9u);
  CHECK(r.config.simulate.environment.rng_seed == 9u);

  o.seed = 12;
  CHECK(parse_config(kSmallSimulate, ".", o).config.simulate.environment.rng_seed == 12u);
  CHECK(has_diagnostic(parse_config(R"({"scenario": "simulate", "rng_seed": -3})", "."), "rng_seed"));
  CHECK(parse_config(R"({"scenario": "odmr"})", ".").ok());
}

TEST_CASE("command-line scenario must agree with the file") {
  Overrides o;
  o.scenario = Scenario::filter;
  CHECK(has_diagnostic(parse_config(kSmallSimulate, ".", o), "scenario", "requested"));
  o.scenario = Scenario::odmr;
  const LoadResult r = parse_config(R"({"odmr": {}})", ".", o);
  CHECK(r.ok());
  CHECK(r.config.scenario == Scenario::odmr);
}

TEST_CASE("paths resolve against the config directory") {
  const LoadResult r = parse_config(R"({"scenario": "odmr", "output_dir": "res"})", "/base");
  CHECK(r.config.output_dir == fs::path("/base/res"));
  CHECK(parse_config(R"({"scenario": "odmr"})", "/base").config.output_dir == fs::path("/base/out/odmr"));
  Overrides o;
  o.output_dir = "/elsewhere";
  CHECK(parse_config(R"({"scenario": "odmr", "output_dir": "res"})", "/base", o).config.output_dir ==
        fs::path("/elsewhere"));

  const LoadResult missing = parse_config(R"({"scenario": "filter", "filter": {"record": "nope.csv"}})", "/base");
  CHECK(has_diagnostic(missing, "filter.record", "file not found"));
  CHECK(has_diagnostic(load_config("/definitely/not/here.json"), "", "cannot read"));
}

TEST_CASE("simulate writes a seeded record and a summary, deterministically") {
  Scratch a("sim_a"), b("sim_b");
  Overrides o;
  o.output_dir = a.path;
  LoadResult r = parse_config(kSmallSimulate, ".", o);
  REQUIRE(r.ok());
  const auto written = run(r.config);
  CHECK(std::find(written.begin(), written.end(), a.path / "summary.json") != written.end());
  const io::RecordFile rec = io::read_record(a.path / "record.csv");
  CHECK(rec.seed == 4u);
  CHECK(rec.record.sample_rate == 2000.0);
  CHECK(rec.record.size() == 4000);
  const auto summary = nlohmann::json::parse(slurp(a.path / "summary.json"));
  CHECK(summary["scenario"] == "simulate");

  r.config.output_dir = b.path;
  const auto again = run(r.config);
  REQUIRE(again.size() == written.size());
  for (std::size_t i = 0; i < written.size(); ++i) CHECK(slurp(written[i]) == slurp(again[i]));

  o.seed = 5;
  o.output_dir = b.path;
  run(parse_config(kSmallSimulate, ".", o).config);
  CHECK(slurp(a.path / "record.csv") != slurp(b.path / "record.csv"));
}

TEST_CASE("filter and report consume simulate outputs") {
  Scratch dir("chain");
  Overrides o;
  o.output_dir = dir.path / "sim";
  REQUIRE(run(parse_config(kSmallSimulate, ".", o).config).size() >= 2);

  const std::string filter = R"({"scenario": "filter", "output_dir": "filt", "filter": {
    "record": "sim/record.csv", "reference": "sim/reference.csv",
    "chain": {"highpass_cutoff": 10, "tracked_harmonics": [50], "subtraction_passes": [2],
              "notch_centers": [50], "notch_bandwidth": 1, "lowpass_cutoff": 800},
    "probe_frequency": 111, "probe_amplitude": 1e-9}})";
  const LoadResult fr = parse_config(filter, dir.path);
  REQUIRE(fr.ok());
  run(fr.config);
  const auto summary = nlohmann::json::parse(slurp(dir.path / "filt" / "summary.json"));
  CHECK(summary["scenario"] == "filter");
  CHECK(fs::exists(dir.path / "filt" / "asd_after.csv"));

  const std::string report = R"({"scenario": "report", "output_dir": "rep", "report": {
    "asd_before": "filt/asd_before.csv", "asd_after": "filt/asd_after.csv",
    "records": ["sim/record.csv"], "band": [30, 170]}})";
  const LoadResult rr = parse_config(report, dir.path);
  REQUIRE(rr.ok());
  run(rr.config);
  for (const char* svg : {"asd_overlay.svg", "spectrogram.svg"}) {
    const std::string doc = slurp(dir.path / "rep" / svg);
    CHECK(doc.find("<svg") != std::string::npos);
    CHECK(well_formed(doc));
  }
}

TEST_CASE("svg rendering is well formed and escapes text") {
  svg::LinePlot plot;
  plot.title = "a < b & c";
  plot.log_y = true;
  plot.series.push_back({"s", {1.0, 2.0, 3.0}, {1e-9, 1e-10, 1e-11}, "#000"});
  const std::string doc = svg::render(plot);
  CHECK(well_formed(doc));
  CHECK(doc.find("a &lt; b &amp; c") != std::string::npos);

  svg::Heatmap map;
  map.x = {1.0, 2.0};
  map.rows = {{0.0, 1.0}, {0.5, 0.25}};
  CHECK(well_formed(svg::render(map)));
}

}  // TEST_SUITE

#endif
