#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eeggcn/linalg.hpp"

namespace eeggcn::dsp {

struct BandDef {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;

  double midpoint_hz() const { return 0.5 * (low_hz + high_hz); }
};

// delta, theta, low-alpha, high-alpha, low-beta, mid-beta, high-beta, gamma.
const std::vector<BandDef>& canonical_bands();

inline constexpr int kCanonicalOrder = 47;
inline constexpr int kDefaultEntropyBins = 16;

// Throws ConfigError unless 0 <= low < high <= fs/2.
void validate_band(const BandDef& band, double fs);

struct FirFilter {
  std::vector<double> coefficients;  // order + 1 taps
  int order = 0;
  BandDef band;
  double fs = 0.0;

  // |H(f)| of the tap sequence.
  double magnitude_at(double freq_hz) const;
};

// Kaiser-windowed sinc band-pass with the DC component removed exactly and
// unit gain at the band midpoint. A band with low_hz == 0 is a low-pass.
FirFilter design_bandpass(const BandDef& band, double fs, int order = kCanonicalOrder);

// Loads externally designed taps (one real per line). The tap count fixes the
// order; symmetry is validated.
FirFilter load_fir_coefficients(const std::filesystem::path& path, const BandDef& band, double fs);

// Zero-padded, group-delay compensated filtering: y[n] = sum_i c[i] x[n + order/2 - i].
std::vector<double> apply_fir(std::span<const double> x, const FirFilter& filter);

double band_power(std::span<const double> x);

// Shannon entropy (nats) of the amplitude histogram over [min, max].
double band_entropy(std::span<const double> x, int bins = kDefaultEntropyBins);

// One matrix per filter, each channels x samples.
using BandDecomposition = std::vector<RowMatrix>;

BandDecomposition decompose(const RowMatrix& segment, std::span<const FirFilter> filters);

std::vector<FirFilter> design_canonical_filters(double fs, int order = kCanonicalOrder);

}  // namespace eeggcn::dsp
