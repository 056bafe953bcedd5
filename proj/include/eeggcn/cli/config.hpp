#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eeggcn/data.hpp"
#include "eeggcn/graph.hpp"
#include "eeggcn/nn/network_spec.hpp"
#include "eeggcn/nn/train.hpp"

namespace eeggcn::cli {

// "GC64M16 - GC64M16 - P2 - FC40" or a preset name net1..net5. Throws
// ParseError carrying the 1-based position of the offending token.
nn::NetworkSpec parse_network_spec(std::string_view text);

enum class SplitMode { Segment, Trial };

struct ExperimentConfig {
  // [data]
  std::string dataset;  // container directory
  data::FeatureKind feature = data::FeatureKind::Entropy;
  int subject = -1;  // -1 pools all subjects
  bool subtract_baseline = false;
  SplitMode split_mode = SplitMode::Segment;
  double train_ratio = 0.8;
  std::uint64_t split_seed = 1;
  std::string fir_coeffs;  // "band=path,..." or a directory of <band>.txt
  int fir_order = dsp::kCanonicalOrder;

  // [graph]
  graph::GraphConfig graph;

  // [network]
  std::string network = "net2";
  std::uint64_t coarsen_seed = 1;

  // [train]
  nn::TrainConfig train;
  int knn_k = 5;  // 0 disables the k-NN baseline

  // [synth]
  data::SynthOptions synth;

  // [grid]
  std::vector<graph::Method> grid_methods{graph::Method::Corr, graph::Method::Dist, graph::Method::Rand};
  std::vector<int> grid_k{4, 8, 12};
  std::vector<double> grid_p{0.3, 0.5, 0.7};
  std::vector<bool> grid_inter_band{true, false};
  std::vector<data::FeatureKind> grid_features{data::FeatureKind::Power, data::FeatureKind::Entropy};
  int repeats = 1;

  // [gradcheck]
  int gradcheck_vertices = 16;
  double gradcheck_p = 0.4;
  double gradcheck_tolerance = 1e-5;
  double gradcheck_floor = 1e-3;  // relative error is |a - n| / max(|a|, |n|, floor)
  std::size_t gradcheck_samples = 64;  // per tensor, 0 = every entry

  std::filesystem::path out_dir = "out";
  bool overwrite = false;

  nn::NetworkSpec network_spec() const { return parse_network_spec(network); }
  // Every value that changes results, as a JSON object.
  std::string to_json() const;
  void validate() const;
};

// key = value lines under [section] headers; '#' and ';' start comments.
// Unknown sections or keys raise ConfigError with the line number.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
// Applies one "section.key" assignment (used for files and flag overrides).
void set_option(ExperimentConfig& config, std::string_view key, std::string_view value);
std::vector<std::string> option_keys();

}  // namespace eeggcn::cli
