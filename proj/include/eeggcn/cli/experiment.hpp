#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "eeggcn/cli/config.hpp"
#include "eeggcn/cli/report.hpp"
#include "eeggcn/coarsen.hpp"
#include "eeggcn/data.hpp"
#include "eeggcn/nn/gradcheck.hpp"
#include "eeggcn/nn/model.hpp"
#include "eeggcn/nn/train.hpp"

namespace eeggcn::cli {

// Canonical filters, with per-band replacements from config.fir_coeffs:
// either "band=path[,band=path...]" or a directory holding <band>.txt files.
std::vector<dsp::FirFilter> make_filters(const ExperimentConfig& config, double fs);

data::TrialSource open_dataset(const ExperimentConfig& config);

// Segmented, split and z-scored features. The per-band correlation
// accumulators see training-split segments only.
struct PreparedData {
  std::vector<data::FeatureSample> samples;
  data::SplitIndices split;
  data::ZScoreStats stats;
  std::vector<graph::CorrelationAccumulator> correlation;  // empty unless requested
};

PreparedData prepare_data(const ExperimentConfig& config, const data::TrialSource& source, bool need_correlation,
                          std::ostream* log = nullptr);

// The merged 8-band graph for one graph configuration.
graph::WeightedGraph build_graph(const graph::GraphConfig& config, const PreparedData& prepared);

struct ModelSetup {
  coarsen::CoarseningHierarchy hierarchy;
  nn::Gcnn model;
  std::vector<nn::GraphSample> train;
  std::vector<nn::GraphSample> test;
};

ModelSetup build_model(const ExperimentConfig& config, const graph::WeightedGraph& g, const PreparedData& prepared);

struct RunOptions {
  bool write_outputs = true;
  std::ostream* log = nullptr;
};

struct ExperimentResult {
  ReportRow row;
  std::optional<ReportRow> knn;
  nn::TrainResult training;
  graph::WeightedGraph graph;
  std::vector<Index> padded_sizes;
};

// load -> segment -> split -> features -> graph -> coarsen -> train ->
// evaluate. Writes checkpoint.cgnet, metrics.jsonl and report.{txt,json}
// under config.out_dir, refusing to replace them without config.overwrite.
ExperimentResult run_experiment(const ExperimentConfig& config, const data::TrialSource& source,
                                const RunOptions& options = {});

ReportRow knn_baseline(const ExperimentConfig& config, const PreparedData& prepared);

// Rebuilds the pipeline for config and scores a checkpoint on its test split.
ReportRow evaluate_checkpoint(const ExperimentConfig& config, const data::TrialSource& source,
                              const std::filesystem::path& checkpoint, std::ostream* log = nullptr);

// methods x densities x inter-band x features GCNN cells, then one k-NN row
// per feature kind. Cell failures are recorded in the row and the grid goes on.
std::vector<ReportRow> run_grid(const ExperimentConfig& config, const data::TrialSource& source,
                                const RunOptions& options = {});

// The configured network on a seeded random graph, checked against central
// differences.
nn::GradCheckReport run_gradcheck(const ExperimentConfig& config, const nn::GradCheckOptions& base = {});

}  // namespace eeggcn::cli
