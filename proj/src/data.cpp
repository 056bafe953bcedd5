#include "eeggcn/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "eeggcn/electrodes.hpp"
#include "eeggcn/error.hpp"

namespace eeggcn::data {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
  return v;
}

// Row r of the file holds channel `order[r]` of the standard layout.
std::vector<std::size_t> channel_order(const std::vector<std::string>& names) {
  const auto& layout = standard_layout();
  if (names.size() != layout.size())
    throw LoadError("manifest lists " + std::to_string(names.size()) + " channels, expected " +
                    std::to_string(layout.size()));
  std::vector<std::size_t> order;
  std::vector<bool> seen(layout.size(), false);
  for (const auto& name : names) {
    const auto idx = layout.index_of(name);
    if (!idx) throw LoadError("unknown channel name '" + name + "'");
    if (seen[*idx]) throw LoadError("duplicate channel name '" + name + "'");
    seen[*idx] = true;
    order.push_back(*idx);
  }
  return order;
}

FloatMatrix read_f32(const fs::path& path, Index rows, Index cols, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(what + ": cannot open " + path.string());
  const auto bytes = static_cast<Index>(fs::file_size(path));
  if (bytes != rows * cols * 4)
    throw LoadError(what + ": expected " + std::to_string(cols) + " floats per channel, file holds " +
                    std::to_string(bytes / 4 / std::max<Index>(rows, 1)) + " (" + path.filename().string() + ")");
  FloatMatrix m(rows, cols);
  std::vector<std::uint32_t> buf(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  if (!in) throw LoadError(what + ": short read from " + path.string());
  for (std::size_t i = 0; i < buf.size(); ++i) m.data()[i] = std::bit_cast<float>(to_le(buf[i]));
  return m;
}

void write_f32(const fs::path& path, const FloatMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot open " + path.string() + " for writing");
  for (Index i = 0; i < m.size(); ++i) {
    const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(m.data()[i]));
    out.write(reinterpret_cast<const char*>(&bits), 4);
  }
  if (!out) throw LoadError("write failed: " + path.string());
}

FloatMatrix reorder(const FloatMatrix& m, const std::vector<std::size_t>& order) {
  FloatMatrix out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) out.row(static_cast<Index>(order[static_cast<std::size_t>(r)])) = m.row(r);
  return out;
}

Index samples_for(double seconds, double fs) {
  const auto n = static_cast<Index>(std::llround(seconds * fs));
  if (n < 1) throw ConfigError("duration " + std::to_string(seconds) + " s is shorter than one sample");
  return n;
}

std::string trial_name(std::size_t i, const TrialEntry& t) {
  return "trial " + std::to_string(i) + " (subject " + std::to_string(t.subject) + ", video " +
         std::to_string(t.video_id) + ")";
}

}  // namespace

Manifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw LoadError("missing manifest: " + path.string());
  Manifest m;
  m.root = dir;
  try {
    const json j = json::parse(in);
    m.fs = j.at("sampling_rate_hz").get<double>();
    m.channels = j.at("channels").get<std::vector<std::string>>();
    for (const auto& t : j.at("trials")) {
      TrialEntry e;
      e.subject = t.at("subject").get<int>();
      e.video_id = t.at("video_id").get<int>();
      e.file = t.at("file").get<std::string>();
      e.num_samples = t.at("num_samples").get<Index>();
      if (t.contains("baseline_file") && !t.at("baseline_file").is_null())
        e.baseline_file = t.at("baseline_file").get<std::string>();
      m.trials.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  if (!(m.fs > 0.0)) throw LoadError("sampling_rate_hz must be positive");
  channel_order(m.channels);
  const auto channels = static_cast<Index>(m.channels.size());
  for (std::size_t i = 0; i < m.trials.size(); ++i) {
    const auto& t = m.trials[i];
    const auto name = trial_name(i, t);
    if (t.video_id < 0 || t.video_id > kMaxVideoId)
      throw LoadError(name + ": video_id outside 0.." + std::to_string(kMaxVideoId));
    if (t.num_samples < 1) throw LoadError(name + ": num_samples must be positive");
    const fs::path file = dir / t.file;
    if (!fs::exists(file)) throw LoadError(name + ": missing file " + file.string());
    const auto bytes = static_cast<Index>(fs::file_size(file));
    if (bytes != channels * t.num_samples * 4)
      throw LoadError(name + ": manifest claims " + std::to_string(t.num_samples) +
                      " samples per channel but the file holds " + std::to_string(bytes / 4 / channels));
    if (t.baseline_file) {
      const fs::path base = dir / *t.baseline_file;
      if (!fs::exists(base)) throw LoadError(name + ": missing baseline file " + base.string());
      if (static_cast<Index>(fs::file_size(base)) != channels * samples_for(kBaselineSeconds, m.fs) * 4)
        throw LoadError(name + ": baseline must hold " + std::to_string(samples_for(kBaselineSeconds, m.fs)) +
                        " samples per channel");
    }
  }
  return m;
}

Recording load_trial(const Manifest& manifest, std::size_t i) {
  const auto& t = manifest.trials.at(i);
  const auto order = channel_order(manifest.channels);
  const auto channels = static_cast<Index>(manifest.channels.size());
  const auto name = trial_name(i, t);
  Recording r;
  r.subject = t.subject;
  r.video_id = t.video_id;
  r.fs = manifest.fs;
  r.samples = reorder(read_f32(manifest.root / t.file, channels, t.num_samples, name), order);
  if (t.baseline_file)
    r.baseline = reorder(read_f32(manifest.root / *t.baseline_file, channels,
                                  samples_for(kBaselineSeconds, manifest.fs), name + " baseline"),
                         order);
  return r;
}

RecordingSet load_recordings(const fs::path& dir) {
  const Manifest m = read_manifest(dir);
  RecordingSet set;
  set.fs = m.fs;
  set.channels = standard_layout().names;
  for (std::size_t i = 0; i < m.trials.size(); ++i) set.recordings.push_back(load_trial(m, i));
  return set;
}

void write_recordings(const fs::path& dir, const RecordingSet& set, bool overwrite) {
  fs::create_directories(dir);
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest) && !overwrite)
    throw UsageError(manifest.string() + " exists (pass --overwrite to replace it)");
  channel_order(set.channels);
  json j;
  j["sampling_rate_hz"] = set.fs;
  j["channels"] = set.channels;
  j["trials"] = json::array();
  for (std::size_t i = 0; i < set.recordings.size(); ++i) {
    const auto& r = set.recordings[i];
    if (r.samples.rows() != static_cast<Index>(set.channels.size()))
      throw ShapeError("recording " + std::to_string(i) + " has the wrong channel count");
    char buf[64];
    std::snprintf(buf, sizeof buf, "trial_%05zu.f32", i);
    json t{{"subject", r.subject}, {"video_id", r.video_id}, {"file", buf}, {"num_samples", r.samples.cols()}};
    write_f32(dir / buf, r.samples);
    if (r.baseline) {
      std::snprintf(buf, sizeof buf, "trial_%05zu_baseline.f32", i);
      write_f32(dir / buf, *r.baseline);
      t["baseline_file"] = buf;
    } else {
      t["baseline_file"] = nullptr;
    }
    j["trials"].push_back(std::move(t));
  }
  std::ofstream out(manifest, std::ios::trunc);
  out << j.dump(1) << '\n';
  if (!out) throw LoadError("write failed: " + manifest.string());
}

TrialSource TrialSource::from_manifest(Manifest manifest) {
  TrialSource s;
  s.fs = manifest.fs;
  for (const auto& t : manifest.trials) {
    s.subjects.push_back(t.subject);
    s.labels.push_back(t.video_id);
    s.lengths.push_back(t.num_samples);
  }
  s.load = [m = std::move(manifest)](std::size_t i) { return load_trial(m, i); };
  return s;
}

TrialSource TrialSource::from_set(const RecordingSet& set) {
  TrialSource s;
  s.fs = set.fs;
  for (const auto& r : set.recordings) {
    s.subjects.push_back(r.subject);
    s.labels.push_back(r.video_id);
    s.lengths.push_back(r.samples.cols());
  }
  s.load = [&set](std::size_t i) { return set.recordings.at(i); };
  return s;
}

Index segment_count(Index length, Index window, Index stride) {
  if (window < 1 || stride < 1) throw ConfigError("window and stride must be positive");
  if (length < window) return 0;
  return (length - window) / stride + 1;
}

std::vector<RowMatrix> segment_trial(const FloatMatrix& samples, double fs, double window_s, double stride_s) {
  const Index window = samples_for(window_s, fs);
  const Index stride = samples_for(stride_s, fs);
  const Index n = segment_count(samples.cols(), window, stride);
  if (n == 0)
    throw SignalTooShortError("trial of " + std::to_string(samples.cols()) + " samples is shorter than the " +
                              std::to_string(window) + "-sample window");
  std::vector<RowMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) out.push_back(samples.middleCols(s * stride, window).cast<double>());
  return out;
}

const char* to_string(FeatureKind kind) { return kind == FeatureKind::Power ? "power" : "entropy"; }

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "power") return FeatureKind::Power;
  if (text == "entropy") return FeatureKind::Entropy;
  throw ConfigError("unknown feature kind '" + std::string(text) + "' (power|entropy)");
}

Vector segment_features(const dsp::BandDecomposition& bands, FeatureKind kind) {
  if (bands.empty()) throw ShapeError("no bands");
  const Index channels = bands.front().rows();
  Vector out(static_cast<Index>(bands.size()) * channels);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& m = bands[b];
    for (Index e = 0; e < channels; ++e) {
      std::span<const double> row(m.data() + e * m.cols(), static_cast<std::size_t>(m.cols()));
      out[static_cast<Index>(b) * channels + e] =
          kind == FeatureKind::Power ? dsp::band_power(row) : dsp::band_entropy(row);
    }
  }
  return out;
}

std::vector<Vector> extract_features(std::span<const RowMatrix> segments, std::span<const dsp::FirFilter> filters,
                                     FeatureKind kind) {
  std::vector<Vector> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) out.push_back(segment_features(dsp::decompose(seg, filters), kind));
  return out;
}

std::vector<SampleKey> enumerate_samples(const TrialSource& source, std::span<const int> trials, double window_s,
                                         double stride_s) {
  const Index window = samples_for(window_s, source.fs);
  const Index stride = samples_for(stride_s, source.fs);
  std::vector<SampleKey> keys;
  for (int t : trials) {
    const auto i = static_cast<std::size_t>(t);
    const Index n = segment_count(source.lengths.at(i), window, stride);
    if (n == 0)
      throw SignalTooShortError("trial " + std::to_string(t) + " is shorter than the " + std::to_string(window) +
                                "-sample window");
    for (Index s = 0; s < n; ++s) keys.push_back({t, static_cast<int>(s), source.labels[i], source.subjects[i]});
  }
  return keys;
}

std::vector<FeatureSample> extract_samples(const TrialSource& source, std::span<const SampleKey> keys,
                                           std::span<const dsp::FirFilter> filters, const ExtractOptions& options) {
  std::vector<FeatureSample> out;
  out.reserve(keys.size());
  int current = -1;
  std::vector<RowMatrix> segments;
  std::optional<Vector> baseline;
  std::vector<bool> done(source.size(), false);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto& key = keys[k];
    if (key.trial != current) {
      const auto t = static_cast<std::size_t>(key.trial);
      if (done.at(t)) throw UsageError("sample keys of one trial must be contiguous");
      done[t] = true;
      current = key.trial;
      const Recording r = source.load(t);
      segments = segment_trial(r.samples, r.fs, options.window_s, options.stride_s);
      baseline.reset();
      if (options.subtract_baseline) {
        if (!r.baseline) throw LoadError("trial " + std::to_string(t) + " has no baseline to subtract");
        baseline = segment_features(dsp::decompose(r.baseline->cast<double>(), filters), options.kind);
      }
    }
    const auto s = static_cast<std::size_t>(key.segment_index);
    if (s >= segments.size()) throw UsageError("segment index out of range");
    const auto bands = dsp::decompose(segments[s], filters);
    if (options.on_segment) options.on_segment(k, bands);
    FeatureSample sample{segment_features(bands, options.kind), key.label, key.subject, key.trial,
                         key.segment_index};
    if (baseline) sample.features -= *baseline;
    out.push_back(std::move(sample));
  }
  return out;
}

ZScoreStats fit_zscore(std::span<const FeatureSample> train) {
  if (train.size() < 2) throw DomainError("z-score statistics need at least 2 training samples");
  const Index d = train.front().features.size();
  ZScoreStats st{Vector::Zero(d), Vector::Zero(d)};
  for (const auto& s : train) {
    if (s.features.size() != d) throw ShapeError("feature length mismatch");
    st.mean += s.features;
  }
  st.mean /= static_cast<double>(train.size());
  for (const auto& s : train) st.stddev += (s.features - st.mean).cwiseAbs2();
  st.stddev = (st.stddev / static_cast<double>(train.size())).cwiseSqrt();
  return st;
}

void apply_zscore(const ZScoreStats& stats, std::span<FeatureSample> samples) {
  for (auto& s : samples) {
    if (s.features.size() != stats.mean.size()) throw ShapeError("feature length mismatch");
    for (Index i = 0; i < s.features.size(); ++i)
      s.features[i] = stats.stddev[i] < 1e-12 ? 0.0 : (s.features[i] - stats.mean[i]) / stats.stddev[i];
  }
}

ZScoreStats zscore_normalize(std::span<FeatureSample> train, std::span<FeatureSample> others) {
  const auto stats = fit_zscore(train);
  apply_zscore(stats, train);
  apply_zscore(stats, others);
  return stats;
}

SplitIndices split(std::span<const int> labels, double ratio, std::uint64_t seed) {
  if (labels.size() < 2) throw DomainError("split needs at least 2 samples");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> members(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
    members[static_cast<std::size_t>(c)].push_back(i);
  }
  for (auto& m : members) std::shuffle(m.begin(), m.end(), rng);

  const auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(labels.size())));
  std::vector<std::size_t> quota(classes.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double exact = ratio * static_cast<double>(members[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < target && r < remainders.size(); ++r, ++assigned) ++quota[remainders[r].second];

  SplitIndices out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t k = 0; k < members[c].size(); ++k) (k < quota[c] ? out.train : out.test).push_back(members[c][k]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitIndices split_groups(std::span<const int> labels, std::span<const int> groups, double ratio,
                          std::uint64_t seed) {
  if (labels.size() != groups.size()) throw ShapeError("labels and groups differ in length");
  std::vector<int> ids(groups.begin(), groups.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<int> group_label(ids.size());
  std::vector<bool> seen(ids.size(), false);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto g = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), groups[i]) - ids.begin());
    if (!seen[g]) group_label[g] = labels[i];
    seen[g] = true;
  }
  const auto by_group = split(group_label, ratio, seed);
  std::vector<bool> in_train(ids.size(), false);
  for (auto g : by_group.train) in_train[g] = true;
  SplitIndices out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto g = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), groups[i]) - ids.begin());
    (in_train[g] ? out.train : out.test).push_back(i);
  }
  return out;
}

RecordingSet synth_dataset(const SynthOptions& o) {
  if (o.num_classes < 2 || o.num_classes > kMaxVideoId + 1)
    throw ConfigError("num_classes must be in 2.." + std::to_string(kMaxVideoId + 1));
  if (o.trials_per_class < 1) throw ConfigError("trials_per_class must be positive");
  const auto& layout = standard_layout();
  const auto& bands = dsp::canonical_bands();
  const auto channels = static_cast<Index>(layout.size());
  const Index n = samples_for(o.duration_s, o.fs);
  const Index nb = samples_for(kBaselineSeconds, o.fs);
  const int nbands = static_cast<int>(bands.size());
  const int groups = static_cast<int>(channels / 8);

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, o.noise_std);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RecordingSet set;
  set.fs = o.fs;
  set.channels = layout.names;
  for (int c = 0; c < o.num_classes; ++c) {
    const int band = c % nbands;
    const int group = (nbands - 1 - band + c / nbands) % groups;
    std::vector<std::pair<int, int>> components{{band, group}};
    if (c >= nbands * groups) components.emplace_back((band + 3) % nbands, (group + 1) % groups);

    for (int t = 0; t < o.trials_per_class; ++t) {
      Recording r;
      r.subject = t;
      r.video_id = c;
      r.fs = o.fs;
      RowMatrix x(channels, n);
      for (Index i = 0; i < x.size(); ++i) x.data()[i] = noise(rng);
      for (const auto& [b, g] : components) {
        const auto& def = bands[static_cast<std::size_t>(b)];
        const double width = def.high_hz - def.low_hz;
        const double freq = def.low_hz + width * (0.25 + 0.5 * unit(rng));
        for (Index e = 8 * g; e < 8 * g + 8; ++e) {
          const double amp = o.amplitude * (0.75 + 0.5 * unit(rng));
          const double phase = 2.0 * std::numbers::pi * unit(rng);
          for (Index k = 0; k < n; ++k)
            x(e, k) += amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(k) / o.fs + phase);
        }
      }
      r.samples = x.cast<float>();
      if (o.with_baseline) {
        FloatMatrix base(channels, nb);
        for (Index i = 0; i < base.size(); ++i) base.data()[i] = static_cast<float>(noise(rng));
        r.baseline = std::move(base);
      }
      set.recordings.push_back(std::move(r));
    }
  }
  return set;
}

}  // namespace eeggcn::data
