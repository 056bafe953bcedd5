#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eeggcn/dsp.hpp"
#include "eeggcn/linalg.hpp"

namespace eeggcn::data {

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kSamplingRate = 128.0;
inline constexpr double kWindowSeconds = 3.0;
inline constexpr double kStrideSeconds = 1.0;
inline constexpr double kBaselineSeconds = 3.0;
inline constexpr int kMaxVideoId = 39;

struct Recording {
  int subject = 0;
  int video_id = 0;  // class label
  double fs = kSamplingRate;
  FloatMatrix samples;                  // channels x time, canonical channel order
  std::optional<FloatMatrix> baseline;  // channels x (3 s)
};

struct RecordingSet {
  double fs = kSamplingRate;
  std::vector<std::string> channels;
  std::vector<Recording> recordings;
};

struct TrialEntry {
  int subject = 0;
  int video_id = 0;
  std::string file;
  Index num_samples = 0;
  std::optional<std::string> baseline_file;
};

// Container directory: manifest.json plus raw little-endian float32 files,
// channel-major.
struct Manifest {
  std::filesystem::path root;
  double fs = kSamplingRate;
  std::vector<std::string> channels;
  std::vector<TrialEntry> trials;
};

// Throws LoadError on a missing or malformed manifest, unknown or duplicate
// channel names, or labels outside 0..39.
Manifest read_manifest(const std::filesystem::path& dir);
// Reads trial i and reorders its rows into the standard electrode order.
Recording load_trial(const Manifest& manifest, std::size_t i);
RecordingSet load_recordings(const std::filesystem::path& dir);
// Refuses to replace an existing manifest unless overwrite is set.
void write_recordings(const std::filesystem::path& dir, const RecordingSet& set, bool overwrite = false);

// Uniform access to in-memory and on-disk recordings.
struct TrialSource {
  double fs = kSamplingRate;
  std::vector<int> subjects;
  std::vector<int> labels;
  std::vector<Index> lengths;
  std::function<Recording(std::size_t)> load;

  std::size_t size() const { return labels.size(); }
  static TrialSource from_manifest(Manifest manifest);
  // The set must outlive the source.
  static TrialSource from_set(const RecordingSet& set);
};

Index segment_count(Index length, Index window, Index stride);
// Throws SignalTooShortError when the trial is shorter than one window.
std::vector<RowMatrix> segment_trial(const FloatMatrix& samples, double fs, double window_s = kWindowSeconds,
                                     double stride_s = kStrideSeconds);

enum class FeatureKind { Power, Entropy };
const char* to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

// 8 bands x channels values, band-major: index = band * channels + electrode.
Vector segment_features(const dsp::BandDecomposition& bands, FeatureKind kind);
std::vector<Vector> extract_features(std::span<const RowMatrix> segments, std::span<const dsp::FirFilter> filters,
                                     FeatureKind kind);

struct FeatureSample {
  Vector features;
  int label = 0;
  int subject = 0;
  int trial = 0;
  int segment_index = 0;
};

// One entry per segment of the selected trials, in trial then segment order.
struct SampleKey {
  int trial = 0;
  int segment_index = 0;
  int label = 0;
  int subject = 0;
};
std::vector<SampleKey> enumerate_samples(const TrialSource& source, std::span<const int> trials,
                                         double window_s = kWindowSeconds, double stride_s = kStrideSeconds);

struct ExtractOptions {
  FeatureKind kind = FeatureKind::Entropy;
  double window_s = kWindowSeconds;
  double stride_s = kStrideSeconds;
  bool subtract_baseline = false;
  // Called with (sample index, band signals) for every segment; used to
  // accumulate correlation graphs over the training split.
  std::function<void(std::size_t, const dsp::BandDecomposition&)> on_segment;
};

// Features for every key, in key order. Keys of one trial must be contiguous.
std::vector<FeatureSample> extract_samples(const TrialSource& source, std::span<const SampleKey> keys,
                                           std::span<const dsp::FirFilter> filters, const ExtractOptions& options);

struct ZScoreStats {
  Vector mean;
  Vector stddev;  // population; below 1e-12 the feature is zeroed
};

ZScoreStats fit_zscore(std::span<const FeatureSample> train);
void apply_zscore(const ZScoreStats& stats, std::span<FeatureSample> samples);
ZScoreStats zscore_normalize(std::span<FeatureSample> train, std::span<FeatureSample> others);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle stratified per class. The training count is
// round(ratio * n) overall; per-class quotas use largest remainders.
SplitIndices split(std::span<const int> labels, double ratio, std::uint64_t seed);
// Keeps all samples sharing a group id on the same side.
SplitIndices split_groups(std::span<const int> labels, std::span<const int> groups, double ratio, std::uint64_t seed);

struct SynthOptions {
  int num_classes = 8;
  int trials_per_class = 8;
  double fs = kSamplingRate;
  double duration_s = 60.0;
  std::uint64_t seed = 1;
  double noise_std = 1.0;
  double amplitude = 2.0;  // mean oscillation amplitude, jittered +-25%
  bool with_baseline = true;
};

// Class c carries an oscillation in band c % 8 on electrode group
// (7 - c % 8 + c / 8) % 4 (groups are electrodes 8g..8g+7), over white noise.
// Classes 32..39 add a second component so all 40 profiles are distinct.
RecordingSet synth_dataset(const SynthOptions& options);

}  // namespace eeggcn::data
