#include "eeggcn/cli/experiment.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

#include <json.hpp>

#include "eeggcn/electrodes.hpp"
#include "eeggcn/error.hpp"
#include "eeggcn/nn/checkpoint.hpp"
#include "eeggcn/nn/knn.hpp"

namespace eeggcn::cli {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double density_of(const graph::GraphConfig& g) {
  return g.method == graph::Method::Rand ? g.p : static_cast<double>(g.k);
}

ReportRow blank_row(const ExperimentConfig& config) {
  ReportRow row;
  row.method = config.graph.method;
  row.inter_band = config.graph.inter_band;
  row.density = density_of(config.graph);
  row.feature = config.feature;
  return row;
}

std::size_t count_correct(const nn::Gcnn& model, const nn::ModelParams& params,
                          std::span<const nn::GraphSample> samples) {
  std::size_t correct = 0;
  for (const auto& s : samples) correct += model.predict(params, s.signal) == s.label;
  return correct;
}

const std::vector<std::string>& artifact_names() {
  static const std::vector<std::string> names{"checkpoint.cgnet", "metrics.jsonl", "report.txt", "report.json"};
  return names;
}

void guard_outputs(const fs::path& dir, const std::vector<std::string>& names, bool overwrite) {
  if (overwrite) return;
  for (const auto& n : names) {
    if (fs::exists(dir / n))
      throw UsageError((dir / n).string() + " exists (pass --overwrite to replace it)");
  }
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

}  // namespace

std::vector<dsp::FirFilter> make_filters(const ExperimentConfig& config, double fs) {
  auto filters = dsp::design_canonical_filters(fs, config.fir_order);
  if (config.fir_coeffs.empty()) return filters;
  const auto& bands = dsp::canonical_bands();
  const auto band_index = [&](std::string_view name) {
    for (std::size_t b = 0; b < bands.size(); ++b)
      if (bands[b].name == name) return b;
    throw ConfigError("unknown band '" + std::string(name) + "' in fir_coeffs");
  };

  const fs::path as_path(config.fir_coeffs);
  if (config.fir_coeffs.find('=') == std::string::npos) {
    if (!fs::is_directory(as_path))
      throw ConfigError("fir_coeffs must be a directory or band=path pairs: " + config.fir_coeffs);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto file = as_path / (bands[b].name + ".txt");
      if (fs::exists(file)) filters[b] = dsp::load_fir_coefficients(file, bands[b], fs);
    }
    return filters;
  }
  std::string_view rest = config.fir_coeffs;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("fir_coeffs entry without '=': " + std::string(item));
    const auto b = band_index(item.substr(0, eq));
    filters[b] = dsp::load_fir_coefficients(std::string(item.substr(eq + 1)), bands[b], fs);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return filters;
}

data::TrialSource open_dataset(const ExperimentConfig& config) {
  if (config.dataset.empty()) throw ConfigError("no dataset given (data.path)");
  return data::TrialSource::from_manifest(data::read_manifest(config.dataset));
}

PreparedData prepare_data(const ExperimentConfig& config, const data::TrialSource& source, bool need_correlation,
                          std::ostream* log) {
  std::vector<int> trials;
  for (std::size_t t = 0; t < source.size(); ++t)
    if (config.subject < 0 || source.subjects[t] == config.subject) trials.push_back(static_cast<int>(t));
  if (trials.empty()) throw ConfigError("no trials selected");

  const auto keys = data::enumerate_samples(source, trials);
  std::vector<int> labels, groups;
  for (const auto& k : keys) {
    labels.push_back(k.label);
    groups.push_back(k.trial);
  }

  PreparedData out;
  out.split = config.split_mode == SplitMode::Segment
                  ? data::split(labels, config.train_ratio, config.split_seed)
                  : data::split_groups(labels, groups, config.train_ratio, config.split_seed);
  std::vector<bool> is_train(keys.size(), false);
  for (auto i : out.split.train) is_train[i] = true;

  const auto filters = make_filters(config, source.fs);
  const auto channels = static_cast<Index>(standard_layout().size());
  if (need_correlation) out.correlation.assign(filters.size(), graph::CorrelationAccumulator(channels));

  data::ExtractOptions opts;
  opts.kind = config.feature;
  opts.subtract_baseline = config.subtract_baseline;
  if (need_correlation) {
    opts.on_segment = [&](std::size_t k, const dsp::BandDecomposition& bands) {
      if (!is_train[k]) return;
      for (std::size_t b = 0; b < bands.size(); ++b) out.correlation[b].add(bands[b]);
    };
  }
  const auto t0 = Clock::now();
  out.samples = data::extract_samples(source, keys, filters, opts);
  if (log)
    *log << "features: " << out.samples.size() << " samples from " << trials.size() << " trials ("
         << out.split.train.size() << " train / " << out.split.test.size() << " test) in " << seconds_since(t0)
         << " s\n";

  std::vector<data::FeatureSample> train;
  for (auto i : out.split.train) train.push_back(out.samples[i]);
  out.stats = data::fit_zscore(train);
  data::apply_zscore(out.stats, out.samples);
  return out;
}

graph::WeightedGraph build_graph(const graph::GraphConfig& config, const PreparedData& prepared) {
  config.validate();
  const auto& layout = standard_layout();
  const auto nbands = dsp::canonical_bands().size();
  std::vector<graph::WeightedGraph> bands;
  for (std::size_t b = 0; b < nbands; ++b) {
    switch (config.method) {
      case graph::Method::Corr:
        if (prepared.correlation.size() != nbands) throw UsageError("correlation statistics were not collected");
        bands.push_back(graph::sparsify_topk(prepared.correlation[b].graph(), config.k));
        break;
      case graph::Method::Dist: {
        const double sigma = config.sigma > 0.0 ? config.sigma : mean_pairwise_distance(layout);
        bands.push_back(graph::sparsify_topk(graph::dist_graph(layout, sigma), config.k));
        break;
      }
      case graph::Method::Rand:
        bands.push_back(graph::rand_graph(static_cast<Index>(layout.size()), config.p, config.seed + b));
        break;
    }
  }
  return graph::merge_bands(bands, config.inter_band);
}

ModelSetup build_model(const ExperimentConfig& config, const graph::WeightedGraph& g, const PreparedData& prepared) {
  const auto spec = config.network_spec();
  auto hierarchy = coarsen::coarsen_until_edgeless(g, spec.pool_count(), config.coarsen_seed);
  auto levels = nn::levels_from_hierarchy(hierarchy, spec.pool_count() + 1);
  const Index padded = hierarchy.padded_size(0);
  nn::Gcnn model(spec, std::move(levels));

  const auto to_graph = [&](const data::FeatureSample& s) {
    if (s.label >= spec.num_classes())
      throw ConfigError("label " + std::to_string(s.label) + " does not fit a network with " +
                        std::to_string(spec.num_classes()) + " outputs");
    return nn::GraphSample{coarsen::perm_data(Matrix(s.features), hierarchy.perm, padded), s.label};
  };
  std::vector<nn::GraphSample> train, test;
  for (auto i : prepared.split.train) train.push_back(to_graph(prepared.samples[i]));
  for (auto i : prepared.split.test) test.push_back(to_graph(prepared.samples[i]));
  return {std::move(hierarchy), std::move(model), std::move(train), std::move(test)};
}

ReportRow knn_baseline(const ExperimentConfig& config, const PreparedData& prepared) {
  const auto t0 = Clock::now();
  const auto stack = [&](const std::vector<std::size_t>& idx, std::vector<int>& labels) {
    Matrix m(static_cast<Index>(idx.size()), prepared.samples.front().features.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      m.row(static_cast<Index>(r)) = prepared.samples[idx[r]].features.transpose();
      labels.push_back(prepared.samples[idx[r]].label);
    }
    return m;
  };
  std::vector<int> train_labels, test_labels;
  const Matrix train = stack(prepared.split.train, train_labels);
  const Matrix test = stack(prepared.split.test, test_labels);
  const auto predicted = nn::knn_predict(train, train_labels, test, config.knn_k);

  ReportRow row;
  row.model = "k-NN (k=" + std::to_string(config.knn_k) + ")";
  row.feature = config.feature;
  row.total = test_labels.size();
  for (std::size_t i = 0; i < predicted.size(); ++i) row.correct += predicted[i] == test_labels[i];
  row.seconds = seconds_since(t0);
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const data::TrialSource& source,
                                const RunOptions& options) {
  const auto t0 = Clock::now();
  config.validate();
  if (options.write_outputs) {
    guard_outputs(config.out_dir, artifact_names(), config.overwrite);
    fs::create_directories(config.out_dir);
  }
  std::ostream* log = options.log;

  const auto prepared = stage("features", [&] {
    return prepare_data(config, source, config.graph.method == graph::Method::Corr, log);
  });
  if (prepared.split.test.empty()) throw ConfigError("the split left no test samples");
  auto g = stage("graph", [&] { return build_graph(config.graph, prepared); });
  auto setup = stage("coarsening", [&] { return build_model(config, g, prepared); });
  const auto& model = setup.model;

  ExperimentResult result;
  result.row = blank_row(config);
  result.graph = std::move(g);
  result.padded_sizes = setup.hierarchy.padded_sizes();
  result.row.parameters = nn::count_parameters(model.spec(), result.padded_sizes);
  if (log)
    *log << "graph: " << result.graph.size() << " vertices, " << result.graph.edge_count() << " edges; padded "
         << result.padded_sizes.front() << " over " << setup.hierarchy.num_levels() << " levels; "
         << result.row.parameters << " parameters\n";

  std::ofstream metrics;
  if (options.write_outputs) {
    metrics.open(config.out_dir / "metrics.jsonl", std::ios::trunc);
    if (!metrics) throw LoadError("cannot write " + (config.out_dir / "metrics.jsonl").string());
  }
  const auto on_epoch = [&](const nn::EpochMetrics& m) {
    nlohmann::json j{{"epoch", m.epoch},
                     {"lr", m.lr},
                     {"train_loss", m.train_loss},
                     {"train_accuracy", m.train_accuracy},
                     {"seconds", m.seconds}};
    j["test_accuracy"] = m.test_accuracy ? nlohmann::json(*m.test_accuracy) : nlohmann::json(nullptr);
    if (metrics.is_open()) metrics << j.dump() << '\n' << std::flush;
    if (log) *log << "epoch " << m.epoch << ": " << j.dump() << '\n';
  };
  result.training = stage("training", [&] {
    return nn::train(model, model.init_params(config.train.seed), setup.train, config.train, setup.test, on_epoch);
  });

  result.row.total = setup.test.size();
  result.row.correct = count_correct(model, result.training.params, setup.test);
  if (config.knn_k > 0) result.knn = stage("k-NN", [&] { return knn_baseline(config, prepared); });
  result.row.seconds = seconds_since(t0);

  if (options.write_outputs) {
    nn::Checkpoint ckpt{model.spec(), result.training.params, config.train.seed, config.train.epochs,
                        config.to_json()};
    nn::write_checkpoint(config.out_dir / "checkpoint.cgnet", ckpt);
    std::vector<ReportRow> rows{result.row};
    if (result.knn) rows.push_back(*result.knn);
    write_report(config.out_dir, "report", rows);
  }
  return result;
}

ReportRow evaluate_checkpoint(const ExperimentConfig& config, const data::TrialSource& source,
                              const fs::path& checkpoint, std::ostream* log) {
  const auto t0 = Clock::now();
  const auto ckpt = nn::read_checkpoint(checkpoint);
  if (!(ckpt.spec == config.network_spec()))
    throw ConfigError("checkpoint network " + ckpt.spec.to_string() + " differs from the configured " +
                      config.network_spec().to_string());
  const auto prepared = prepare_data(config, source, config.graph.method == graph::Method::Corr, log);
  const auto g = build_graph(config.graph, prepared);
  const auto setup = build_model(config, g, prepared);
  if (!(setup.model.layout() == ckpt.params.layout))
    throw ConfigError("checkpoint tensor shapes do not match the rebuilt model (different graph or coarsening?)");
  ReportRow row = blank_row(config);
  row.parameters = nn::count_parameters(setup.model.spec(), setup.hierarchy.padded_sizes());
  row.total = setup.test.size();
  row.correct = count_correct(setup.model, ckpt.params, setup.test);
  row.seconds = seconds_since(t0);
  return row;
}

std::vector<ReportRow> run_grid(const ExperimentConfig& config, const data::TrialSource& source,
                                const RunOptions& options) {
  config.validate();
  if (options.write_outputs) {
    guard_outputs(config.out_dir, {"grid.txt", "grid.json"}, config.overwrite);
    fs::create_directories(config.out_dir);
  }
  std::ostream* log = options.log;
  const bool need_corr =
      std::find(config.grid_methods.begin(), config.grid_methods.end(), graph::Method::Corr) !=
      config.grid_methods.end();

  struct Cell {
    graph::GraphConfig graph;
    data::FeatureKind feature;
  };
  std::vector<Cell> cells;
  for (auto method : config.grid_methods) {
    const std::size_t densities = method == graph::Method::Rand ? config.grid_p.size() : config.grid_k.size();
    for (std::size_t d = 0; d < densities; ++d) {
      for (bool inter : config.grid_inter_band) {
        for (auto feature : config.grid_features) {
          graph::GraphConfig g = config.graph;
          g.method = method;
          g.inter_band = inter;
          if (method == graph::Method::Rand) g.p = config.grid_p[d];
          else g.k = config.grid_k[d];
          cells.push_back({g, feature});
        }
      }
    }
  }

  std::vector<ReportRow> rows(cells.size());
  std::vector<ReportRow> baselines;
  for (auto feature : config.grid_features) {
    ExperimentConfig fc = config;
    fc.feature = feature;
    std::optional<PreparedData> prepared;
    std::string prepare_error;
    try {
      prepared = prepare_data(fc, source, need_corr, log);
    } catch (const std::exception& e) {
      prepare_error = std::string("features: ") + e.what();
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].feature != feature) continue;
      ExperimentConfig cc = fc;
      cc.graph = cells[c].graph;
      ReportRow row = blank_row(cc);
      const auto t0 = Clock::now();
      try {
        if (!prepared) throw Error(prepare_error);
        const auto g = build_graph(cc.graph, *prepared);
        const auto setup = build_model(cc, g, *prepared);
        row.parameters = nn::count_parameters(setup.model.spec(), setup.hierarchy.padded_sizes());
        for (int r = 0; r < config.repeats; ++r) {
          nn::TrainConfig tc = cc.train;
          tc.seed = cc.train.seed + static_cast<std::uint64_t>(r);
          const auto trained = nn::train(setup.model, setup.model.init_params(tc.seed), setup.train, tc);
          row.correct += count_correct(setup.model, trained.params, setup.test);
          row.total += setup.test.size();
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.seconds = seconds_since(t0);
      if (log)
        *log << "cell " << c + 1 << "/" << cells.size() << " " << graph::to_string(row.method) << " "
             << row.density_text() << " inter_band=" << row.inter_band << " " << data::to_string(row.feature)
             << ": " << (row.error ? "failed: " + *row.error : row.accuracy_text() + "%") << '\n';
      rows[c] = std::move(row);
    }

    if (config.knn_k > 0) {
      ReportRow row;
      row.model = "k-NN (k=" + std::to_string(config.knn_k) + ")";
      row.feature = feature;
      try {
        if (!prepared) throw Error(prepare_error);
        row = knn_baseline(fc, *prepared);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      baselines.push_back(std::move(row));
    }
  }
  rows.insert(rows.end(), baselines.begin(), baselines.end());
  if (options.write_outputs) write_report(config.out_dir, "grid", rows);
  return rows;
}

nn::GradCheckReport run_gradcheck(const ExperimentConfig& config, const nn::GradCheckOptions& base) {
  const auto spec = config.network_spec();
  const auto g = graph::rand_graph(config.gradcheck_vertices, config.gradcheck_p, config.graph.seed);
  const auto h = coarsen::coarsen_until_edgeless(g, spec.pool_count(), config.coarsen_seed);
  nn::Gcnn model(spec, nn::levels_from_hierarchy(h, spec.pool_count() + 1));
  const auto params = model.init_params(config.train.seed);

  std::mt19937_64 rng(config.train.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Matrix x = Matrix::Zero(model.input_vertices(), 1);
  for (Index r = 0; r < x.rows(); ++r)
    if (model.levels().front().mask[r] != 0.0) x(r, 0) = normal(rng);
  const int label = static_cast<int>(rng() % static_cast<std::uint64_t>(spec.num_classes()));

  nn::GradCheckOptions opts = base;
  opts.tolerance = config.gradcheck_tolerance;
  opts.abs_floor = config.gradcheck_floor;
  opts.max_per_tensor = config.gradcheck_samples;
  opts.l2_coef = config.train.l2_coef;
  return nn::grad_check(model, params, std::move(x), label, opts);
}

}  // namespace eeggcn::cli
