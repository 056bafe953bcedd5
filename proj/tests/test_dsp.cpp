#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "eeggcn/dsp.hpp"
#include "eeggcn/error.hpp"

using namespace eeggcn;
using namespace eeggcn::dsp;

namespace {

constexpr double kFs = 128.0;

// Independent DTFT of a tap sequence.
double dtft_gain(const std::vector<double>& taps, double f, double fs) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * f * static_cast<double>(k) / fs;
    re += taps[k] * std::cos(w);
    im -= taps[k] * std::sin(w);
  }
  return std::hypot(re, im);
}

double db(double g) { return 20.0 * std::log10(g); }

std::vector<double> tone(double f, std::size_t n, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / kFs + phase);
  return x;
}

}  // namespace

TEST_CASE("canonical band table") {
  const auto& bands = canonical_bands();
  REQUIRE(bands.size() == 8);
  CHECK(bands[0].name == "delta");
  CHECK(bands[0].low_hz == 0.0);
  CHECK(bands[0].high_hz == 3.0);
  CHECK(bands[2].low_hz == 8.0);
  CHECK(bands[3].low_hz == 10.0);
  CHECK(bands[6].high_hz == 29.0);
  CHECK(bands[7].low_hz == 31.0);
  CHECK(bands[7].high_hz == 50.0);
  for (const auto& b : bands) CHECK_NOTHROW(validate_band(b, kFs));
}

TEST_CASE("design: tap count and symmetry") {
  for (const auto& band : canonical_bands()) {
    const auto f = design_bandpass(band, kFs, kCanonicalOrder);
    REQUIRE(f.coefficients.size() == 48);
    CHECK(f.order == 47);
    for (int i = 0; i <= f.order; ++i) CHECK(f.coefficients[i] == doctest::Approx(f.coefficients[f.order - i]).epsilon(1e-12));
  }
}

TEST_CASE("design: passband and stopband contract on every band") {
  for (const auto& band : canonical_bands()) {
    CAPTURE(band.name);
    const auto taps = design_bandpass(band, kFs).coefficients;
    CHECK(db(dtft_gain(taps, band.midpoint_hz(), kFs)) >= -3.0);
    for (double f = std::min(kFs / 2, 2.0 * band.high_hz); f <= kFs / 2 + 1e-9; f += 0.25)
      CHECK(db(dtft_gain(taps, f, kFs)) <= -20.0);
    if (band.low_hz >= 2.0)
      for (double f = 0.0; f <= band.low_hz / 2 + 1e-9; f += 0.25) CHECK(db(dtft_gain(taps, f, kFs)) <= -20.0);
  }
}

TEST_CASE("design: band-pass rejects DC, theta midpoint gain") {
  for (const auto& band : canonical_bands()) {
    if (band.low_hz == 0.0) continue;
    double sum = 0.0;
    for (double c : design_bandpass(band, kFs).coefficients) sum += c;
    CHECK(std::abs(sum) <= 0.05);
  }
  const auto theta = design_bandpass(canonical_bands()[1], kFs);
  const double g = dtft_gain(theta.coefficients, 5.5, kFs);
  CHECK(g >= 0.7);
  CHECK(g <= 1.1);
  CHECK(theta.magnitude_at(5.5) == doctest::Approx(g).epsilon(1e-12));
}

TEST_CASE("design: invalid bands") {
  CHECK_THROWS_AS(design_bandpass({"x", 10, 5}, kFs), ConfigError);
  CHECK_THROWS_AS(design_bandpass({"x", 10, 70}, kFs), ConfigError);
  CHECK_THROWS_AS(design_bandpass({"x", -1, 5}, kFs), ConfigError);
  CHECK_THROWS_AS(design_bandpass({"x", 4, 7}, kFs, 1), ConfigError);
}

TEST_CASE("apply_fir: impulse response, zeros, too short") {
  const auto f = design_bandpass(canonical_bands()[4], kFs);
  std::vector<double> x(200, 0.0);
  const std::size_t centre = 100;
  x[centre] = 1.0;
  const auto y = apply_fir(x, f);
  REQUIRE(y.size() == x.size());
  const int delay = f.order / 2;
  // y[n] = c[n - centre + delay]
  for (std::size_t n = 0; n < y.size(); ++n) {
    const long i = static_cast<long>(n) - static_cast<long>(centre) + delay;
    const double expected = (i >= 0 && i <= f.order) ? f.coefficients[static_cast<std::size_t>(i)] : 0.0;
    CHECK(y[n] == expected);
  }
  const auto zeros = apply_fir(std::vector<double>(100, 0.0), f);
  for (double v : zeros) CHECK(v == 0.0);
  CHECK_THROWS_AS(apply_fir(std::vector<double>(47, 1.0), f), SignalTooShortError);
  CHECK_NOTHROW(apply_fir(std::vector<double>(48, 1.0), f));
}

TEST_CASE("apply_fir: matches a direct zero-padded convolution") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> x(300);
  for (auto& v : x) v = nd(rng);
  const auto f = design_bandpass(canonical_bands()[7], kFs);
  const auto y = apply_fir(x, f);
  // Full convolution, then drop `delay` leading samples.
  std::vector<double> full(x.size() + f.coefficients.size() - 1, 0.0);
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = 0; b < f.coefficients.size(); ++b) full[a + b] += x[a] * f.coefficients[b];
  for (std::size_t n = 0; n < y.size(); ++n) CHECK(y[n] == doctest::Approx(full[n + 23]).epsilon(1e-12));
}

TEST_CASE("apply_fir: midpoint sinusoid amplitude") {
  for (const auto& band : canonical_bands()) {
    CAPTURE(band.name);
    const auto f = design_bandpass(band, kFs);
    const auto x = tone(band.midpoint_hz(), 4096);
    const auto y = apply_fir(x, f);
    double peak = 0.0;
    for (std::size_t i = 200; i < y.size() - 200; ++i) peak = std::max(peak, std::abs(y[i]));
    CHECK(peak >= 0.7);
    CHECK(peak <= 1.1);
  }
}

TEST_CASE("band_power") {
  CHECK(band_power(std::vector<double>(10, 3.0)) == doctest::Approx(9.0));
  CHECK(band_power(std::vector<double>{1, -1, 1, -1}) == 1.0);
  // 8 full periods of a 4 Hz tone at 128 Hz.
  CHECK(band_power(tone(4.0, 256, 2.0, 0.3)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(band_power(std::vector<double>(5, 0.0)) == 0.0);
  CHECK_THROWS_AS(band_power(std::vector<double>{}), DomainError);
}

TEST_CASE("band_entropy") {
  CHECK(band_entropy(std::vector<double>(50, 2.5)) == 0.0);
  std::vector<double> uniform;
  for (int b = 0; b < 16; ++b)
    for (int r = 0; r < 4; ++r) uniform.push_back(b + 0.5);
  // Bin edges 0.5 + 15/16 * j put each value in its own bin.
  CHECK(band_entropy(uniform, 16) == doctest::Approx(std::log(16.0)));
  CHECK(band_entropy(std::vector<double>{0, 0, 1, 1}, 16) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(band_entropy(std::vector<double>{1, 2}, 1), ConfigError);
  CHECK_THROWS_AS(band_entropy(std::vector<double>{}, 16), DomainError);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<double> x(500);
  for (auto& v : x) v = nd(rng);
  const double h = band_entropy(x, 16);
  CHECK(h >= 0.0);
  CHECK(h <= std::log(16.0));

  // Histogram oracle.
  const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
  std::vector<int> counts(16, 0);
  for (double v : x) counts[std::min(15, static_cast<int>(std::floor((v - lo) / (hi - lo) * 16)))]++;
  double oracle = 0.0;
  for (int c : counts)
    if (c) oracle -= (c / 500.0) * std::log(c / 500.0);
  CHECK(h == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("decompose: shapes, zeros, 18 Hz selectivity") {
  const auto filters = design_canonical_filters(kFs);
  RowMatrix seg = RowMatrix::Zero(32, 384);
  auto bands = decompose(seg, filters);
  REQUIRE(bands.size() == 8);
  for (const auto& b : bands) {
    CHECK(b.rows() == 32);
    CHECK(b.cols() == 384);
    CHECK(b.cwiseAbs().maxCoeff() == 0.0);
  }
  const auto t = tone(18.0, 384);
  for (Index c = 0; c < 32; ++c)
    for (Index i = 0; i < 384; ++i) seg(c, i) = t[static_cast<std::size_t>(i)];
  bands = decompose(seg, filters);
  std::vector<double> energy;
  for (const auto& b : bands) energy.push_back(b.squaredNorm());
  for (std::size_t b = 0; b < 8; ++b)
    if (b != 5) CHECK(energy[5] > energy[b]);
}

TEST_CASE("band selectivity at every midpoint") {
  const auto filters = design_canonical_filters(kFs);
  const auto& bands = canonical_bands();
  for (std::size_t k = 0; k < bands.size(); ++k) {
    CAPTURE(bands[k].name);
    const auto x = tone(bands[k].midpoint_hz(), 2048);
    const double own = band_power(apply_fir(x, filters[k]));
    for (std::size_t j = 0; j < bands.size(); ++j) {
      if (j + 1 >= k && j <= k + 1) continue;  // skip self and adjacent
      CHECK(own > band_power(apply_fir(x, filters[j])));
    }
  }
}

TEST_CASE("load_fir_coefficients") {
  const auto dir = std::filesystem::temp_directory_path() / "eeggcn_test_dsp";
  std::filesystem::create_directories(dir);
  const auto designed = design_bandpass(canonical_bands()[1], kFs);
  {
    std::ofstream out(dir / "theta.txt");
    out.precision(17);
    for (double c : designed.coefficients) out << c << "\n\n";
  }
  const auto loaded = load_fir_coefficients(dir / "theta.txt", canonical_bands()[1], kFs);
  CHECK(loaded.order == 47);
  CHECK(loaded.coefficients == designed.coefficients);

  {
    std::ofstream out(dir / "bad.txt");
    out << "0.1\n0.2\n0.3\n";
  }
  CHECK_THROWS_AS(load_fir_coefficients(dir / "bad.txt", canonical_bands()[1], kFs), LoadError);
  {
    std::ofstream out(dir / "junk.txt");
    out << "0.1\nabc\n0.1\n";
  }
  CHECK_THROWS_AS(load_fir_coefficients(dir / "junk.txt", canonical_bands()[1], kFs), LoadError);
  CHECK_THROWS_AS(load_fir_coefficients(dir / "missing.txt", canonical_bands()[1], kFs), LoadError);
  std::filesystem::remove_all(dir);
}
