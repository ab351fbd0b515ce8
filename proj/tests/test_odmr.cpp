#include <doctest.h>

#include <cmath>
#include <vector>

#include "nvmag/errors.hpp"
#include "nvmag/odmr.hpp"
#include "nvmag/synth.hpp"
#include "support.hpp"

using namespace nvmag;

namespace {

OdmrModel single_line(double fwhm = 1e6, double contrast = 0.02) {
  OdmrModel m;
  m.fwhm = fwhm;
  m.n_hyperfine_lines = 1;
  m.contrast_per_line = contrast;
  return m;
}

OdmrModel random_model(testing::Rng& rng) {
  OdmrModel m;
  m.center_frequency = rng.uniform(2.8e9, 2.95e9);
  m.fwhm = rng.uniform(2e5, 5e6);
  m.n_hyperfine_lines = rng.integer(1, 3);
  m.contrast_per_line = rng.uniform(1e-3, 0.3 / m.n_hyperfine_lines);
  m.hyperfine_spacing = rng.uniform(0.0, 3e6);
  m.bias_field_parallel = rng.uniform(-2e-3, 2e-3);
  return m;
}

}  // namespace

TEST_SUITE("odmr") {

TEST_CASE("lineshape matches the reference dip sum") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const OdmrModel m = random_model(rng);
    const double f = m.resonance_center() + rng.uniform(-5.0, 5.0) * m.fwhm;
    const double ref = testing::lorentz_dips(f, m.resonance_center(), m.fwhm, m.contrast_per_line,
                                             m.n_hyperfine_lines, m.hyperfine_spacing);
    CHECK(lineshape(m, f) == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("lineshape stays in (1 - C_total, 1] and is symmetric about the resonance") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const OdmrModel m = random_model(rng);
    const double c = m.resonance_center();
    const double d = rng.uniform(0.0, 10.0) * m.fwhm;
    const double lo = lineshape(m, c - d), hi = lineshape(m, c + d);
    CHECK(lo > 1.0 - m.total_contrast());
    CHECK(lo <= 1.0);
    CHECK(std::abs(lo - hi) <= 1e-15);
  }
}

TEST_CASE("single line dip depth at the centre is the contrast") {
  const OdmrModel m = single_line();
  CHECK(lineshape(m, m.resonance_center()) == doctest::Approx(1.0 - 0.02).epsilon(1e-15));
}

TEST_CASE("analytic slope agrees with a central difference") {
  testing::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const OdmrModel m = random_model(rng);
    const double f = m.resonance_center() + rng.uniform(-3.0, 3.0) * m.fwhm;
    const double h = m.fwhm * 1e-5;
    const double numeric = (lineshape(m, f + h) - lineshape(m, f - h)) / (2.0 * h);
    CHECK(lineshape_slope(m, f) == doctest::Approx(numeric).epsilon(1e-6).scale(m.total_contrast() / m.fwhm));
  }
}

TEST_CASE("slope vanishes at the dip centre") {
  const OdmrModel m = single_line();
  CHECK(std::abs(lineshape_slope(m, m.resonance_center())) < 1e-22);
}

TEST_CASE("max-slope setpoint of a single line sits fwhm/(2 sqrt 3) below the centre") {
  for (double fwhm : {2e5, 1e6, 3e6}) {
    const OdmrModel m = single_line(fwhm);
    const Setpoint sp = max_slope_setpoint(m);
    // ties resolve to the lower frequency
    CHECK(std::abs(sp.frequency - (m.resonance_center() - fwhm / (2.0 * std::sqrt(3.0)))) < 1.0);
    CHECK(std::abs(sp.slope) == doctest::Approx(0.02 * 3.0 * std::sqrt(3.0) / (4.0 * fwhm)).epsilon(1e-9));
  }
}

TEST_CASE("max-slope setpoint of the hyperfine triplet matches a 1 Hz brute-force scan") {
  OdmrModel m;  // default triplet, 1 MHz lines, 2.16 MHz spacing
  const double c = m.resonance_center();
  // analytic derivative of the dip sum, written out term by term
  auto slope = [&](double f) {
    double d = 0.0;
    for (int k = -1; k <= 1; ++k) {
      const double u = (f - c - k * m.hyperfine_spacing) / (0.5 * m.fwhm);
      d += m.contrast_per_line * 2.0 * u / ((1.0 + u * u) * (1.0 + u * u) * 0.5 * m.fwhm);
    }
    return d;
  };
  double best_f = 0.0, best = -1.0;
  for (double f = c - 6e6; f <= c + 6e6; f += 1.0) {
    const double s = std::abs(slope(f));
    if (s > best * (1.0 + 1e-12)) best = s, best_f = f;
  }
  CHECK(std::abs(max_slope_setpoint(m).frequency - best_f) <= 1.0);
}

TEST_CASE("flat model has no setpoint") {
  CHECK_THROWS_AS(max_slope_setpoint(single_line(1e6, 0.0)), NoSetpointError);
}

TEST_CASE("zeeman shift: 1 nT gives 28 Hz, odd and linear in B") {
  const OdmrModel m;
  CHECK(zeeman_shift(m, 1e-9) == 28.0);
  testing::Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const double b = rng.uniform(-1e-3, 1e-3), b2 = rng.uniform(-1e-3, 1e-3);
    CHECK(zeeman_shift(m, -b) == -zeeman_shift(m, b));
    CHECK(zeeman_shift(m, b + b2) == doctest::Approx(zeeman_shift(m, b) + zeeman_shift(m, b2)).epsilon(1e-12));
  }
}

TEST_CASE("bias field moves the resonance by its Zeeman shift") {
  OdmrModel m = single_line();
  m.bias_field_parallel = 2e-3;
  CHECK(m.resonance_center() == doctest::Approx(2.87e9 + 56e6).epsilon(1e-15));
  CHECK(lineshape(m, 2.87e9 + 56e6) == doctest::Approx(0.98).epsilon(1e-15));
}

TEST_CASE("cw shot-noise sensitivity: frozen reference values") {
  // Independently evaluated: 4/(3 sqrt 3) fwhm / (gamma C sqrt(P lambda / (h c))).
  PhotonBudget five{5e-3, 700e-9}, six{6e-3, 700e-9};
  CHECK(cw_shot_noise_sensitivity(single_line(1e6, 0.02), five) ==
        doctest::Approx(1.0356056859551838e-11).epsilon(1e-12));
  CHECK(cw_shot_noise_sensitivity(single_line(1e6, 0.01), five) ==
        doctest::Approx(2.0712113719103676e-11).epsilon(1e-12));
  CHECK(cw_shot_noise_sensitivity(single_line(1e6, 0.02), six) ==
        doctest::Approx(9.453743247971085e-12).epsilon(1e-12));
  CHECK(cw_shot_noise_sensitivity(single_line(1e6, 0.01), six) ==
        doctest::Approx(1.890748649594217e-11).epsilon(1e-12));
}

TEST_CASE("cw sensitivity scales with fwhm, 1/contrast and 1/sqrt(rate)") {
  const double base = cw_shot_noise_sensitivity(single_line(1e6, 0.02), 1e16);
  CHECK(cw_shot_noise_sensitivity(single_line(2e6, 0.02), 1e16) == doctest::Approx(2.0 * base).epsilon(1e-14));
  CHECK(cw_shot_noise_sensitivity(single_line(1e6, 0.04), 1e16) == doctest::Approx(0.5 * base).epsilon(1e-14));
  CHECK(cw_shot_noise_sensitivity(single_line(1e6, 0.02), 4e16) == doctest::Approx(0.5 * base).epsilon(1e-14));
  // the triplet's summed contrast is what matters
  OdmrModel triplet;
  triplet.contrast_per_line = 0.02 / 3.0;
  CHECK(cw_shot_noise_sensitivity(triplet, 1e16) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("cw sensitivity rejects zero contrast or power") {
  CHECK_THROWS_AS(cw_shot_noise_sensitivity(single_line(1e6, 0.0), 1e16), DomainError);
  CHECK_THROWS_AS(cw_shot_noise_sensitivity(single_line(), PhotonBudget{0.0, 700e-9}), DomainError);
}

TEST_CASE("model validation") {
  OdmrModel m = single_line();
  m.fwhm = -1.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = single_line(1e6, 1.0);
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = single_line();
  m.n_hyperfine_lines = 0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = OdmrModel{};
  m.contrast_per_line = 0.4;  // three lines summing past 1
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = OdmrModel{};
  m.hyperfine_spacing = -1.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
}

TEST_CASE("averaging gain is sqrt(n)") {
  CHECK(averaging_gain(1) == 1.0);
  CHECK(averaging_gain(100) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(averaging_gain(0), DomainError);
}

TEST_CASE("averaging N noisy records reduces noise by sqrt(N) over 100 Monte Carlo repeats") {
  const double fs = 1000.0, duration = 1.0;
  const int repeats = 100;
  double std1 = 0.0;
  for (std::size_t n : {1u, 4u, 16u}) {
    double acc = 0.0;
    for (int r = 0; r < repeats; ++r) {
      std::vector<Timeseries> parts;
      for (std::size_t k = 0; k < n; ++k)
        parts.push_back(gen_white(1e-10, fs, duration, 1000u * static_cast<unsigned>(r) + 17u * n + k));
      acc += standard_deviation(average(parts));
    }
    const double s = acc / repeats;
    if (n == 1) std1 = s;
    CHECK(std1 / s == doctest::Approx(averaging_gain(n)).epsilon(0.15));
  }
}

}  // TEST_SUITE
