#include "eeggcn/cli/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "eeggcn/error.hpp"

namespace eeggcn::cli {
namespace {

nlohmann::json to_json(const ReportRow& r) {
  nlohmann::json j{{"model", r.model},
                   {"feature", data::to_string(r.feature)},
                   {"correct", r.correct},
                   {"total", r.total},
                   {"accuracy_percent", r.total ? r.accuracy_text() : ""},
                   {"accuracy", r.accuracy()},
                   {"seconds", r.seconds}};
  if (!r.is_baseline()) {
    j["graph"] = graph::to_string(r.method);
    j["inter_band"] = r.inter_band;
    j["density"] = r.density_text();
    j["parameters"] = r.parameters;
  }
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
  return j;
}

std::string cell(const ReportRow* r) {
  if (!r) return "-";
  if (r->error) return "failed";
  if (r->total == 0) return "-";
  return r->accuracy_text();
}

}  // namespace

double ReportRow::accuracy() const {
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string ReportRow::density_text() const {
  char buf[32];
  if (method == graph::Method::Rand) std::snprintf(buf, sizeof buf, "p=%g", density);
  else std::snprintf(buf, sizeof buf, "k=%g", density);
  return buf;
}

std::string ReportRow::format_percent(std::size_t correct, std::size_t total) {
  if (total == 0) throw DomainError("accuracy of an empty set");
  if (correct > total) throw DomainError("more correct predictions than samples");
  const unsigned long long num = static_cast<unsigned long long>(correct) * 10000ULL;
  unsigned long long q = num / total;
  const unsigned long long twice_rem = 2 * (num % total);
  if (twice_rem > total || (twice_rem == total && q % 2 == 1)) ++q;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu.%02llu", q / 100, q % 100);
  return buf;
}

std::string row_json(const ReportRow& row) { return to_json(row).dump(); }

std::string render_table(std::span<const ReportRow> rows) {
  struct Line {
    const ReportRow* power = nullptr;
    const ReportRow* entropy = nullptr;
    const ReportRow* key = nullptr;
  };
  std::vector<Line> gcnn, baseline;
  const auto slot = [](std::vector<Line>& lines, const ReportRow& r, auto same) {
    Line* line = nullptr;
    for (auto& l : lines)
      if (same(*l.key, r)) line = &l;
    if (!line) {
      lines.push_back({nullptr, nullptr, &r});
      line = &lines.back();
    }
    (r.feature == data::FeatureKind::Power ? line->power : line->entropy) = &r;
  };
  for (const auto& r : rows) {
    if (r.is_baseline())
      slot(baseline, r, [](const ReportRow& a, const ReportRow& b) { return a.model == b.model; });
    else
      slot(gcnn, r, [](const ReportRow& a, const ReportRow& b) {
        return a.method == b.method && a.inter_band == b.inter_band && a.density == b.density;
      });
  }

  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %-10s %-8s %9s %9s\n", "Graph", "Inter-band", "Density", "Power", "Entropy");
  out << buf << std::string(48, '-') << '\n';
  for (const auto& l : gcnn) {
    std::snprintf(buf, sizeof buf, "%-8s %-10s %-8s %9s %9s\n", graph::to_string(l.key->method),
                  l.key->inter_band ? "yes" : "no", l.key->density_text().c_str(), cell(l.power).c_str(),
                  cell(l.entropy).c_str());
    out << buf;
  }
  if (!baseline.empty()) out << std::string(48, '-') << '\n';
  for (const auto& l : baseline) {
    std::snprintf(buf, sizeof buf, "%-28s %9s %9s\n", l.key->model.c_str(), cell(l.power).c_str(),
                  cell(l.entropy).c_str());
    out << buf;
  }
  return out.str();
}

std::string render_json(std::span<const ReportRow> rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(to_json(r));
  return j.dump(1) + "\n";
}

void write_report(const std::filesystem::path& dir, const std::string& stem, std::span<const ReportRow> rows) {
  std::filesystem::create_directories(dir);
  std::ofstream txt(dir / (stem + ".txt"), std::ios::trunc);
  txt << render_table(rows);
  std::ofstream js(dir / (stem + ".json"), std::ios::trunc);
  js << render_json(rows);
  if (!txt || !js) throw LoadError("cannot write report files in " + dir.string());
}

}  // namespace eeggcn::cli
