#include "eeggcn/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include "eeggcn/error.hpp"

namespace eeggcn::dsp {
namespace {

constexpr double kKaiserBeta = 2.0;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Ideal low-pass impulse response sampled around the filter centre.
std::vector<double> ideal_lowpass(double cutoff_hz, double fs, int order) {
  std::vector<double> h(order + 1);
  const double fc = 2.0 * cutoff_hz / fs;
  const double centre = 0.5 * order;
  for (int n = 0; n <= order; ++n) h[n] = fc * sinc(fc * (n - centre));
  return h;
}

std::vector<double> kaiser_window(int order, double beta) {
  std::vector<double> w(order + 1);
  const double norm = std::cyl_bessel_i(0.0, beta);
  for (int n = 0; n <= order; ++n) {
    const double r = 2.0 * n / order - 1.0;
    w[n] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
  }
  return w;
}

}  // namespace

const std::vector<BandDef>& canonical_bands() {
  static const std::vector<BandDef> bands = {
      {"delta", 0.0, 3.0},      {"theta", 4.0, 7.0},     {"low-alpha", 8.0, 10.0},
      {"high-alpha", 10.0, 12.0}, {"low-beta", 13.0, 16.0}, {"mid-beta", 17.0, 20.0},
      {"high-beta", 21.0, 29.0},  {"gamma", 31.0, 50.0},
  };
  return bands;
}

void validate_band(const BandDef& band, double fs) {
  if (!(fs > 0.0)) throw ConfigError("sampling rate must be positive");
  if (!(band.low_hz >= 0.0) || !(band.low_hz < band.high_hz) || band.high_hz > 0.5 * fs) {
    std::ostringstream msg;
    msg << "invalid band edges for '" << band.name << "': [" << band.low_hz << ", "
        << band.high_hz << "] Hz at fs=" << fs;
    throw ConfigError(msg.str());
  }
}

double FirFilter::magnitude_at(double freq_hz) const {
  std::complex<double> acc{0.0, 0.0};
  const double step = -2.0 * std::numbers::pi * freq_hz / fs;
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    acc += coefficients[k] * std::polar(1.0, step * static_cast<double>(k));
  return std::abs(acc);
}

FirFilter design_bandpass(const BandDef& band, double fs, int order) {
  validate_band(band, fs);
  if (order < 2) throw ConfigError("filter order must be at least 2");

  const auto window = kaiser_window(order, kKaiserBeta);
  auto taps = ideal_lowpass(band.high_hz, fs, order);
  if (band.low_hz > 0.0) {
    const auto low = ideal_lowpass(band.low_hz, fs, order);
    for (int n = 0; n <= order; ++n) taps[n] -= low[n];
  }
  for (int n = 0; n <= order; ++n) taps[n] *= window[n];

  if (band.low_hz > 0.0) {
    // Pull the response at 0 Hz to exactly zero; the window is symmetric so
    // linear phase survives.
    double tap_sum = 0.0, window_sum = 0.0;
    for (int n = 0; n <= order; ++n) {
      tap_sum += taps[n];
      window_sum += window[n];
    }
    const double scale = tap_sum / window_sum;
    for (int n = 0; n <= order; ++n) taps[n] -= scale * window[n];
  }

  FirFilter filter{std::move(taps), order, band, fs};
  const double gain = filter.magnitude_at(band.midpoint_hz());
  if (!(gain > 0.0)) throw NumericError("band-pass design has zero gain at midpoint for " + band.name);
  for (auto& c : filter.coefficients) c /= gain;
  // Enforce exact symmetry; rounding in the window can leave 1-ulp skew.
  for (int n = 0; n < (order + 1) / 2; ++n) {
    const double avg = 0.5 * (filter.coefficients[n] + filter.coefficients[order - n]);
    filter.coefficients[n] = filter.coefficients[order - n] = avg;
  }
  return filter;
}

FirFilter load_fir_coefficients(const std::filesystem::path& path, const BandDef& band, double fs) {
  validate_band(band, fs);
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open coefficient file " + path.string());
  std::vector<double> taps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(line, &used);
    } catch (const std::exception&) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
    if (line.find_first_not_of(" \t\r", used) != std::string::npos)
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": trailing characters");
    taps.push_back(value);
  }
  if (taps.size() < 3) throw LoadError(path.string() + ": need at least 3 taps");
  double scale = 0.0;
  for (double c : taps) scale = std::max(scale, std::abs(c));
  const std::size_t order = taps.size() - 1;
  for (std::size_t i = 0; i <= order; ++i) {
    if (std::abs(taps[i] - taps[order - i]) > 1e-12 * std::max(1.0, scale))
      throw LoadError(path.string() + ": taps are not symmetric (linear phase required)");
  }
  return FirFilter{std::move(taps), static_cast<int>(order), band, fs};
}

std::vector<double> apply_fir(std::span<const double> x, const FirFilter& filter) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t order = filter.order;
  if (n <= order) {
    throw SignalTooShortError("signal of length " + std::to_string(n) +
                              " is too short for a filter of order " + std::to_string(order));
  }
  const std::ptrdiff_t delay = order / 2;
  const auto& c = filter.coefficients;
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    // x index j = t + delay - i must lie in [0, n).
    const std::ptrdiff_t i_lo = std::max<std::ptrdiff_t>(0, t + delay - (n - 1));
    const std::ptrdiff_t i_hi = std::min<std::ptrdiff_t>(order, t + delay);
    double acc = 0.0;
    for (std::ptrdiff_t i = i_lo; i <= i_hi; ++i) acc += c[i] * x[t + delay - i];
    y[t] = acc;
  }
  return y;
}

double band_power(std::span<const double> x) {
  if (x.empty()) throw DomainError("band_power of an empty signal");
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double band_entropy(std::span<const double> x, int bins) {
  if (bins < 2) throw ConfigError("entropy needs at least 2 bins");
  if (x.empty()) throw DomainError("band_entropy of an empty signal");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return 0.0;

  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / bins;
  for (double v : x) {
    auto b = static_cast<int>((v - lo) / width);
    counts[std::clamp(b, 0, bins - 1)]++;
  }
  const double total = static_cast<double>(x.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

BandDecomposition decompose(const RowMatrix& segment, std::span<const FirFilter> filters) {
  if (segment.rows() == 0 || segment.cols() == 0) throw ShapeError("decompose: empty segment");
  BandDecomposition out;
  out.reserve(filters.size());
  std::vector<double> row(static_cast<std::size_t>(segment.cols()));
  for (const auto& filter : filters) {
    RowMatrix band(segment.rows(), segment.cols());
    for (Index ch = 0; ch < segment.rows(); ++ch) {
      Eigen::Map<Eigen::RowVectorXd>(row.data(), segment.cols()) = segment.row(ch);
      const auto y = apply_fir(row, filter);
      band.row(ch) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), segment.cols());
    }
    out.push_back(std::move(band));
  }
  return out;
}

std::vector<FirFilter> design_canonical_filters(double fs, int order) {
  std::vector<FirFilter> filters;
  for (const auto& band : canonical_bands()) filters.push_back(design_bandpass(band, fs, order));
  return filters;
}

}  // namespace eeggcn::dsp
