#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nvmag/errors.hpp"
#include "nvmag/lockin.hpp"
#include "support.hpp"

using namespace nvmag;

namespace {

OdmrModel single_line() {
  OdmrModel m;
  m.fwhm = 1e6;
  m.n_hyperfine_lines = 1;
  m.contrast_per_line = 0.02;
  return m;
}

std::vector<double> grid_around(double center, double half_span, double step) {
  std::vector<double> g;
  const auto n = static_cast<int>(std::llround(half_span / step));
  for (int k = -n; k <= n; ++k) g.push_back(center + k * step);
  return g;
}

// Lock-in output evaluated by a fine trapezoid rule over one modulation
// period, independent of the library's per-period sampling.
double demod_oracle(const OdmrModel& m, double deviation, double carrier) {
  const int n = 20000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    acc += testing::lorentz_dips(carrier + deviation * std::sin(th), m.resonance_center(), m.fwhm,
                                 m.contrast_per_line, m.n_hyperfine_lines, m.hyperfine_spacing) *
           std::sin(th);
  }
  return 2.0 * acc / n;
}

}  // namespace

TEST_SUITE("lockin") {

TEST_CASE("demodulated response matches quadrature reference values") {
  // (1/pi) * integral over one period of L(c + 250 kHz sin t) sin t, scipy quad.
  const OdmrModel m = single_line();
  const FmDriveConfig drive;
  const double c = m.resonance_center();
  const double offsets[] = {-1e6, -5e5, -2e5, 1e5, 3e5};
  const double expected[] = {-0.0016730201828486404, -0.004951764808076692, -0.004734228485923893,
                             0.0027283083292191147, 0.005650277624133025};
  for (int i = 0; i < 5; ++i)
    CHECK(demod_response(m, drive, c + offsets[i]) == doctest::Approx(expected[i]).epsilon(1e-9));
  CHECK(std::abs(demod_response(m, drive, c)) < 1e-15);
}

TEST_CASE("demodulated response matches a fine-grid oracle for the triplet") {
  OdmrModel m;
  FmDriveConfig drive;
  testing::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const double carrier = m.resonance_center() + rng.uniform(-5e6, 5e6);
    CHECK(demod_response(m, drive, carrier) ==
          doctest::Approx(demod_oracle(m, drive.peak_deviation, carrier)).epsilon(1e-9).scale(1e-3));
  }
}

TEST_CASE("small deviation approaches deviation times the lineshape slope") {
  const OdmrModel m = single_line();
  FmDriveConfig drive;
  drive.peak_deviation = 1e3;
  for (double off : {-6e5, -2.9e5, 1e5, 4e5}) {
    const double f = m.resonance_center() + off;
    CHECK(demod_response(m, drive, f) ==
          doctest::Approx(drive.peak_deviation * lineshape_slope(m, f)).epsilon(1e-4));
  }
}

TEST_CASE("demodulated curve is antisymmetric about the resonance") {
  testing::Rng rng(22);
  for (int lines : {1, 3}) {
    OdmrModel m;
    m.n_hyperfine_lines = lines;
    const FmDriveConfig drive;
    for (int trial = 0; trial < 50; ++trial) {
      const double d = rng.uniform(0.0, 6e6);
      const double lo = demod_response(m, drive, m.resonance_center() - d);
      const double hi = demod_response(m, drive, m.resonance_center() + d);
      CHECK(std::abs(lo + hi) <= 1e-15);
    }
  }
}

TEST_CASE("three-tone drive behaves as one line with the summed contrast") {
  OdmrModel m;
  FmDriveConfig three;
  three.three_tone_enabled = true;
  const FmDriveConfig plain;
  for (double off : {-7e5, -1e5, 2e5, 9e5})
    CHECK(demod_response(m, three, m.resonance_center() + off) ==
          doctest::Approx(demod_response(m.collapsed(), plain, m.resonance_center() + off)).epsilon(1e-14));
}

TEST_CASE("tracked setpoint is the steepest point of the demodulated curve") {
  const OdmrModel m = single_line();
  const FmDriveConfig drive;
  const double step = 1e3;
  const auto grid = grid_around(m.resonance_center(), 3e6, step);
  const DemodCurve curve = sweep_demod(m, drive, grid);

  // oracle: scan |d demod / d carrier| with the independent evaluator
  double best_f = 0.0, best = -1.0;
  for (double f : grid) {
    const double s = std::abs(demod_oracle(m, drive.peak_deviation, f + 0.5 * step) -
                              demod_oracle(m, drive.peak_deviation, f - 0.5 * step));
    if (s > best * (1.0 + 1e-9)) best = s, best_f = f;
  }
  const double tracked = track_setpoint(curve);
  CHECK(std::abs(tracked - best_f) <= step);
  CHECK(std::abs(tracked - m.resonance_center()) <= step);
}

TEST_CASE("tracked setpoint follows a +200 kHz drift") {
  const OdmrModel m = single_line();
  const FmDriveConfig drive;
  const double step = 1e3;
  const auto grid = grid_around(m.resonance_center(), 3e6, step);
  const double before = track_setpoint(sweep_demod(m, drive, grid));
  const double after = track_setpoint(sweep_demod(m.shifted(200e3), drive, grid));
  CHECK(std::abs((after - before) - 200e3) <= step);
}

TEST_CASE("tracked setpoint is invariant under scaling of the curve") {
  const OdmrModel m = single_line();
  const FmDriveConfig drive;
  const auto grid = grid_around(m.resonance_center() + 37e3, 2e6, 2e3);
  DemodCurve curve = sweep_demod(m, drive, grid);
  const double base = track_setpoint(curve);
  for (double k : {1e-6, 0.5, 3.7, -2.0, 1e6}) {
    DemodCurve scaled = curve;
    for (double& v : scaled.demod_values) v *= k;
    CHECK(track_setpoint(scaled) == base);
  }
}

TEST_CASE("flat curve has no setpoint") {
  DemodCurve flat{{1.0, 2.0, 3.0}, {0.5, 0.5, 0.5}};
  CHECK_THROWS_AS(track_setpoint(flat), NoSetpointError);
}

TEST_CASE("field to voltage conversion is linear and invertible") {
  const OdmrModel m = single_line();
  FmDriveConfig drive;
  drive.carrier_frequency = m.resonance_center();
  const double cal = 2.5;
  testing::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const double b = rng.uniform(-1e-8, 1e-8);
    const double v = field_to_voltage(m, drive, cal, b);
    CHECK(voltage_to_field(m, drive, cal, v) == doctest::Approx(b).epsilon(1e-12));
    CHECK(field_to_voltage(m, drive, cal, 2.0 * b) == doctest::Approx(2.0 * v).epsilon(1e-12));
  }
}

TEST_CASE("small-signal voltage agrees with a moved resonance") {
  const OdmrModel m = single_line();
  FmDriveConfig drive;
  drive.carrier_frequency = m.resonance_center();
  for (double b : {1e-9, -5e-9, 1e-7}) {
    CHECK(simulated_voltage(m, drive, 1.0, b) ==
          doctest::Approx(field_to_voltage(m, drive, 1.0, b)).epsilon(1e-4));
  }
}

TEST_CASE("drive validation") {
  FmDriveConfig d;
  d.modulation_frequency = 0.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
  d = FmDriveConfig{};
  d.peak_deviation = -1.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
  d = FmDriveConfig{};
  d.three_tone_enabled = true;
  d.three_tone_spacing = 0.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
  DemodCurve bad{{2.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("integration uses exactly 16 modulation periods by default") {
  CHECK(FmDriveConfig{}.integration_periods == 16);
}

}  // TEST_SUITE
