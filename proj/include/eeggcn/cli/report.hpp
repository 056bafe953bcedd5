#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "eeggcn/data.hpp"
#include "eeggcn/graph.hpp"

namespace eeggcn::cli {

struct ReportRow {
  std::string model = "GCNN";  // or "k-NN"
  graph::Method method = graph::Method::Dist;
  bool inter_band = true;
  double density = 4;  // k for corr/dist, p for rand
  data::FeatureKind feature = data::FeatureKind::Entropy;
  std::size_t correct = 0;
  std::size_t total = 0;
  long long parameters = 0;
  double seconds = 0.0;
  std::optional<std::string> error;

  bool is_baseline() const { return model != "GCNN"; }
  double accuracy() const;  // in [0, 1]
  std::string accuracy_text() const { return format_percent(correct, total); }
  std::string density_text() const;

  // 100 * correct / total to 2 decimals, ties to even, in exact arithmetic.
  static std::string format_percent(std::size_t correct, std::size_t total);
};

std::string row_json(const ReportRow& row);

// Fixed-column layout: one line per (graph, inter-band, density), one column
// per feature kind, baseline rows last.
std::string render_table(std::span<const ReportRow> rows);
std::string render_json(std::span<const ReportRow> rows);

// Writes <stem>.txt and <stem>.json into dir.
void write_report(const std::filesystem::path& dir, const std::string& stem, std::span<const ReportRow> rows);

}  // namespace eeggcn::cli
