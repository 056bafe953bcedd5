// eeggcn: EEG graph-convolution experiments from the command line.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "eeggcn/cli/config.hpp"
#include "eeggcn/cli/experiment.hpp"
#include "eeggcn/cli/report.hpp"
#include "eeggcn/error.hpp"
#include "eeggcn/graph.hpp"

using namespace eeggcn;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dump_graph;
  std::string fir_coeffs;
  std::string data;
  std::vector<std::string> overrides;
  bool overwrite = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "Experiment config file (key = value with [sections])");
  app->add_option("--seed", f.seed, "Seed override (synth: dataset seed, otherwise training seed)");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--dump-graph", f.dump_graph, "Write the merged graph as an edge list");
  app->add_option("--fir-coeffs", f.fir_coeffs, "Directory of <band>.txt tap files, or band=path[,band=path]");
  app->add_option("--data", f.data, "Recording container directory (overrides data.path)");
  app->add_option("--set", f.overrides, "Override one option: section.key=value (repeatable)");
  app->add_flag("--overwrite", f.overwrite, "Replace existing output files");
}

cli::ExperimentConfig resolve(const CommonFlags& f, bool seed_is_synth = false) {
  cli::ExperimentConfig c;
  if (!f.config_path.empty()) c = cli::load_config(f.config_path);
  for (const auto& o : f.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + o + "'");
    cli::set_option(c, o.substr(0, eq), o.substr(eq + 1));
  }
  if (f.seed) (seed_is_synth ? c.synth.seed : c.train.seed) = *f.seed;
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.fir_coeffs.empty()) c.fir_coeffs = f.fir_coeffs;
  if (!f.data.empty()) c.dataset = f.data;
  c.overwrite = f.overwrite;
  c.validate();
  return c;
}

void maybe_dump(const CommonFlags& f, const graph::WeightedGraph& g) {
  if (f.dump_graph.empty()) return;
  graph::write_graph(std::filesystem::path(f.dump_graph), g);
  std::cerr << "graph written to " << f.dump_graph << '\n';
}

int cmd_synth(const CommonFlags& f) {
  auto c = resolve(f, true);
  const auto set = data::synth_dataset(c.synth);
  data::write_recordings(c.out_dir, set, c.overwrite);
  std::cout << "wrote " << set.recordings.size() << " recordings (" << c.synth.num_classes << " classes x "
            << c.synth.trials_per_class << " trials) to " << c.out_dir.string() << '\n';
  return 0;
}

int cmd_features(const CommonFlags& f) {
  auto c = resolve(f);
  const auto source = cli::open_dataset(c);
  const auto prepared = cli::prepare_data(c, source, false, &std::cerr);
  std::filesystem::create_directories(c.out_dir);
  const auto path = c.out_dir / "features.csv";
  if (std::filesystem::exists(path) && !c.overwrite)
    throw UsageError(path.string() + " exists (pass --overwrite to replace it)");
  std::vector<char> is_train(prepared.samples.size(), 0);
  for (auto i : prepared.split.train) is_train[i] = 1;
  std::ofstream out(path, std::ios::trunc);
  out << "trial,segment,subject,label,split";
  for (Index i = 0; i < prepared.samples.front().features.size(); ++i) out << ",f" << i;
  out << '\n';
  char buf[32];
  for (std::size_t s = 0; s < prepared.samples.size(); ++s) {
    const auto& x = prepared.samples[s];
    out << x.trial << ',' << x.segment_index << ',' << x.subject << ',' << x.label << ','
        << (is_train[s] ? "train" : "test");
    for (Index i = 0; i < x.features.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", x.features[i]);
      out << buf;
    }
    out << '\n';
  }
  std::cout << "wrote " << prepared.samples.size() << " z-scored samples to " << path.string() << '\n';
  return 0;
}

int cmd_graph(const CommonFlags& f) {
  auto c = resolve(f);
  const auto source = cli::open_dataset(c);
  const auto prepared = cli::prepare_data(c, source, c.graph.method == graph::Method::Corr, &std::cerr);
  const auto g = cli::build_graph(c.graph, prepared);
  maybe_dump(f, g);
  const auto spec = c.network_spec();
  const auto h = coarsen::coarsen_until_edgeless(g, spec.pool_count(), c.coarsen_seed);
  const auto lap = graph::normalized_laplacian(g);
  std::cout << "vertices " << g.size() << "\nedges " << g.edge_count() << "\ncomponents "
            << graph::connected_components(g) << "\nlambda_max " << lap.lambda_max << "\npadded sizes";
  for (auto n : h.padded_sizes()) std::cout << ' ' << n;
  std::cout << "\nparameters " << nn::count_parameters(spec, h.padded_sizes()) << " (" << spec.to_string()
            << ")\n";
  return 0;
}

int cmd_train(const CommonFlags& f) {
  auto c = resolve(f);
  const auto source = cli::open_dataset(c);
  const auto result = cli::run_experiment(c, source, {true, &std::cerr});
  maybe_dump(f, result.graph);
  std::vector<cli::ReportRow> rows{result.row};
  if (result.knn) rows.push_back(*result.knn);
  std::cout << cli::render_table(rows);
  std::cout << "parameters " << result.row.parameters << ", " << result.row.seconds << " s; outputs in "
            << c.out_dir.string() << '\n';
  return 0;
}

int cmd_eval(const CommonFlags& f, const std::string& checkpoint) {
  auto c = resolve(f);
  const auto source = cli::open_dataset(c);
  const auto path = checkpoint.empty() ? c.out_dir / "checkpoint.cgnet" : std::filesystem::path(checkpoint);
  const auto row = cli::evaluate_checkpoint(c, source, path, &std::cerr);
  std::cout << "test accuracy " << row.accuracy_text() << "% (" << row.correct << "/" << row.total << ")\n";
  return 0;
}

int cmd_gradcheck(const CommonFlags& f) {
  auto c = resolve(f);
  const auto report = cli::run_gradcheck(c);
  std::printf("%-12s %8s %12s %14s %14s\n", "tensor", "checked", "max rel err", "analytic", "numeric");
  for (const auto& t : report.tensors)
    std::printf("%-12s %8zu %12.3e %14.6e %14.6e\n", t.name.c_str(), t.checked, t.max_relative_error, t.analytic,
                t.numeric);
  std::printf("%s: max relative error %.3e (tolerance %.1e, %zu entries, %d retries)\n",
              report.passed ? "PASS" : "FAIL", report.max_relative_error, c.gradcheck_tolerance, report.checked,
              report.retries);
  return report.passed ? 0 : 1;
}

int cmd_grid(const CommonFlags& f, std::optional<int> repeats) {
  auto c = resolve(f);
  if (repeats) c.repeats = *repeats;
  c.validate();
  const auto source = cli::open_dataset(c);
  const auto rows = cli::run_grid(c, source, {true, &std::cerr});
  std::cout << cli::render_table(rows);
  bool failed = false;
  for (const auto& r : rows) failed = failed || r.error.has_value();
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph convolutional networks on EEG band features"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string checkpoint;
  std::optional<int> repeats;
  auto* synth = app.add_subcommand("synth", "Write a synthetic recording container");
  auto* features = app.add_subcommand("features", "Extract z-scored band features to CSV");
  auto* graph_cmd = app.add_subcommand("graph", "Build the merged graph and report its coarsening");
  auto* train = app.add_subcommand("train", "Run one experiment: train, evaluate, write artifacts");
  auto* eval = app.add_subcommand("eval", "Score a checkpoint on the configured test split");
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the configured network");
  auto* grid = app.add_subcommand("grid", "Run the graph x density x inter-band x feature grid");
  for (auto* sub : {synth, features, graph_cmd, train, eval, gradcheck, grid}) add_common(sub, flags);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file (default <out>/checkpoint.cgnet)");
  grid->add_option("--repeats", repeats, "Training runs per cell, averaged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) return cmd_synth(flags);
    if (*features) return cmd_features(flags);
    if (*graph_cmd) return cmd_graph(flags);
    if (*train) return cmd_train(flags);
    if (*eval) return cmd_eval(flags, checkpoint);
    if (*gradcheck) return cmd_gradcheck(flags);
    if (*grid) return cmd_grid(flags, repeats);
  } catch (const ParseError& e) {
    std::cerr << "error: network spec: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
