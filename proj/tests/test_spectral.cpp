#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nvmag/errors.hpp"
#include "nvmag/spectral.hpp"
#include "nvmag/synth.hpp"
#include "support.hpp"

using namespace nvmag;

namespace {

Timeseries sine(double f, double amplitude, double fs, double duration, double phase = 0.0) {
  Timeseries ts = Timeseries::zeros(fs, duration);
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * f * ts.time(i) + phase);
  return ts;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("welch density matches scipy reference values") {
  // scipy.signal.welch(x, 1000, 'hann', 512, 256, detrend='constant'), square-rooted
  const Timeseries ts(1000.0, testing::chirp_mix(4096));
  const Spectrum s = asd(ts, 512);
  REQUIRE(s.frequencies.size() == 257);
  CHECK(s.resolution() == doctest::Approx(1000.0 / 512.0));
  const std::size_t bins[] = {0, 1, 10, 48, 49, 50, 100, 256};
  const double expected[] = {0.006548813087592913, 0.00788433123440915, 0.011014113514899095,
                             0.010486147274999589, 0.012754604554234302, 0.014714551046685143,
                             5.8039458972450545e-05, 9.84465952388125e-06};
  for (int i = 0; i < 8; ++i) CHECK(s.density[bins[i]] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("integrated squared density equals the record variance") {
  testing::Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const double fs = rng.uniform(500.0, 5000.0);
    const std::size_t seg = 256u << rng.integer(0, 3);
    Timeseries ts = gen_white(rng.uniform(1e-12, 1e-9), fs, 20.0 * seg / fs, 100 + trial);
    const Timeseries tone = sine(rng.uniform(5.0, 0.4 * fs), 1e-9, fs, ts.duration());
    for (std::size_t i = 0; i < ts.size(); ++i) ts.samples[i] += tone.samples[i];
    CHECK(integrated_power(asd(ts, seg)) == doctest::Approx(testing::variance(ts.samples)).epsilon(0.05));
  }
}

TEST_CASE("zero record has zero density") {
  const Spectrum s = asd(Timeseries::zeros(1000.0, 2.0), 500);
  for (double d : s.density) CHECK(d == 0.0);
}

TEST_CASE("asd rejects bad segment lengths") {
  const Timeseries ts = Timeseries::zeros(1000.0, 1.0);
  CHECK_THROWS_AS(asd(ts, 1), DomainError);
  CHECK_THROWS_AS(asd(ts, 1001), DomainError);
  CHECK_NOTHROW(asd(ts, 1000));
}

TEST_CASE("band median ignores excluded bands") {
  Spectrum s;
  for (int k = 0; k <= 100; ++k) {
    s.frequencies.push_back(k);
    s.density.push_back(k >= 40 && k <= 60 ? 100.0 : 1.0);
  }
  CHECK(band_median(s, {0.0, 100.0}) == 1.0);
  const Band spike[] = {{35.0, 65.0}};
  CHECK(band_median(s, {30.0, 70.0}, spike) == 1.0);
  const Band all[] = {{0.0, 100.0}};
  CHECK_THROWS_AS(band_median(s, {10.0, 20.0}, all), DomainError);
}

TEST_CASE("bin lookup on grids that do not start at zero") {
  Spectrum s;
  for (int k = 0; k < 50; ++k) s.frequencies.push_back(30.0 + 0.5 * k), s.density.push_back(0.0);
  CHECK(s.bin_of(30.0) == 0);
  CHECK(s.bin_of(40.2) == 20);
  CHECK(s.bin_of(40.3) == 21);
}

TEST_CASE("spectrogram rows are band limited and normalized to their peak") {
  std::vector<Timeseries> records;
  for (double f : {40.0, 60.0, 80.0}) records.push_back(sine(f, 1e-9, 1000.0, 10.0));
  const Spectrogram sg = spectrogram(records, {30.0, 100.0});
  REQUIRE(sg.rows.size() == 3);
  CHECK(sg.frequencies.front() >= 30.0);
  CHECK(sg.frequencies.back() <= 100.0);
  const double peaks[] = {40.0, 60.0, 80.0};
  for (std::size_t r = 0; r < 3; ++r) {
    REQUIRE(sg.rows[r].size() == sg.frequencies.size());
    std::size_t arg = 0;
    for (std::size_t k = 0; k < sg.rows[r].size(); ++k)
      if (sg.rows[r][k] > sg.rows[r][arg]) arg = k;
    CHECK(sg.rows[r][arg] == 1.0);
    CHECK(sg.frequencies[arg] == doctest::Approx(peaks[r]));
  }
}

TEST_CASE("spectrogram rejects mixed sample rates") {
  const Timeseries recs[] = {Timeseries::zeros(1000.0, 1.0), Timeseries::zeros(500.0, 2.0)};
  CHECK_THROWS_AS(spectrogram(recs, {10.0, 100.0}), DomainError);
}

TEST_CASE("peak width of a bin-centred tone spans three bins at -20 dB") {
  const double fs = 1000.0;
  const Spectrum s = asd(sine(50.0, 1.0, fs, 10.0), 10000);
  // periodic Hann leaks to the neighbours at -6 dB; each bin counts one resolution
  CHECK(peak_width(s, 50.0, 2.0) == doctest::Approx(3.0 * s.resolution()));
  CHECK(peak_width(s, 50.0, 2.0, -3.0) == doctest::Approx(s.resolution()));
  CHECK(peak_density(s, 50.0, 2.0) == doctest::Approx(s.density[s.bin_of(50.0)]));
}

TEST_CASE("least-squares tone fit recovers amplitude and phase") {
  testing::Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(1e-10, 1e-8), ph = rng.uniform(-3.0, 3.0), f = rng.uniform(10.0, 400.0);
    const ToneFit fit = fit_tone(sine(f, a, 1000.0, 3.3, ph), f);
    CHECK(fit.amplitude == doctest::Approx(a).epsilon(1e-9));
    CHECK(std::remainder(fit.phase - ph, 2.0 * std::numbers::pi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cross-correlation finds a known integer lag") {
  const auto a = testing::chirp_mix(2000);
  for (int lag : {-7, 0, 3, 25}) {
    std::vector<double> b(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto j = static_cast<std::ptrdiff_t>(i) + lag;
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(b.size())) b[static_cast<std::size_t>(j)] = a[i];
    }
    CHECK(xcorr_peak_lag(a, b, 40) == lag);
  }
}

}  // TEST_SUITE
