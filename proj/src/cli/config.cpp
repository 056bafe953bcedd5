#include "eeggcn/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "eeggcn/error.hpp"

namespace eeggcn::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

template <typename T>
T number(std::string_view key, std::string_view v) {
  T out{};
  if (!parse_number(v, out)) throw ConfigError(std::string(key) + ": not a valid number: '" + std::string(v) + "'");
  return out;
}

bool boolean(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected on/off, got '" + std::string(v) + "'");
}

std::vector<std::string_view> list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"data.path", [](auto& c, auto, auto v) { c.dataset = std::string(trim(v)); }},
      {"data.feature", [](auto& c, auto, auto v) { c.feature = data::parse_feature_kind(trim(v)); }},
      {"data.subject", [](auto& c, auto k, auto v) { c.subject = number<int>(k, v); }},
      {"data.subtract_baseline", [](auto& c, auto k, auto v) { c.subtract_baseline = boolean(k, v); }},
      {"data.split",
       [](auto& c, auto k, auto v) {
         v = trim(v);
         if (v == "segment") c.split_mode = SplitMode::Segment;
         else if (v == "trial") c.split_mode = SplitMode::Trial;
         else throw ConfigError(std::string(k) + ": expected segment or trial");
       }},
      {"data.train_ratio", [](auto& c, auto k, auto v) { c.train_ratio = number<double>(k, v); }},
      {"data.split_seed", [](auto& c, auto k, auto v) { c.split_seed = number<std::uint64_t>(k, v); }},
      {"data.fir_coeffs", [](auto& c, auto, auto v) { c.fir_coeffs = std::string(trim(v)); }},
      {"data.fir_order", [](auto& c, auto k, auto v) { c.fir_order = number<int>(k, v); }},

      {"graph.method", [](auto& c, auto, auto v) { c.graph.method = graph::parse_method(trim(v)); }},
      {"graph.k", [](auto& c, auto k, auto v) { c.graph.k = number<int>(k, v); }},
      {"graph.p", [](auto& c, auto k, auto v) { c.graph.p = number<double>(k, v); }},
      {"graph.sigma", [](auto& c, auto k, auto v) { c.graph.sigma = number<double>(k, v); }},
      {"graph.inter_band", [](auto& c, auto k, auto v) { c.graph.inter_band = boolean(k, v); }},
      {"graph.seed", [](auto& c, auto k, auto v) { c.graph.seed = number<std::uint64_t>(k, v); }},

      {"network.spec", [](auto& c, auto, auto v) { c.network = std::string(trim(v)); }},
      {"network.coarsen_seed", [](auto& c, auto k, auto v) { c.coarsen_seed = number<std::uint64_t>(k, v); }},

      {"train.epochs", [](auto& c, auto k, auto v) { c.train.epochs = number<int>(k, v); }},
      {"train.lr", [](auto& c, auto k, auto v) { c.train.initial_lr = number<double>(k, v); }},
      {"train.lr_decay", [](auto& c, auto k, auto v) { c.train.lr_decay = number<double>(k, v); }},
      {"train.l2", [](auto& c, auto k, auto v) { c.train.l2_coef = number<double>(k, v); }},
      {"train.batch_size", [](auto& c, auto k, auto v) { c.train.batch_size = number<int>(k, v); }},
      {"train.seed", [](auto& c, auto k, auto v) { c.train.seed = number<std::uint64_t>(k, v); }},
      {"train.knn_k", [](auto& c, auto k, auto v) { c.knn_k = number<int>(k, v); }},

      {"synth.classes", [](auto& c, auto k, auto v) { c.synth.num_classes = number<int>(k, v); }},
      {"synth.trials_per_class", [](auto& c, auto k, auto v) { c.synth.trials_per_class = number<int>(k, v); }},
      {"synth.duration", [](auto& c, auto k, auto v) { c.synth.duration_s = number<double>(k, v); }},
      {"synth.seed", [](auto& c, auto k, auto v) { c.synth.seed = number<std::uint64_t>(k, v); }},
      {"synth.noise_std", [](auto& c, auto k, auto v) { c.synth.noise_std = number<double>(k, v); }},
      {"synth.amplitude", [](auto& c, auto k, auto v) { c.synth.amplitude = number<double>(k, v); }},
      {"synth.baseline", [](auto& c, auto k, auto v) { c.synth.with_baseline = boolean(k, v); }},

      {"grid.methods",
       [](auto& c, auto, auto v) {
         c.grid_methods.clear();
         for (auto item : list(v)) c.grid_methods.push_back(graph::parse_method(item));
       }},
      {"grid.k",
       [](auto& c, auto k, auto v) {
         c.grid_k.clear();
         for (auto item : list(v)) c.grid_k.push_back(number<int>(k, item));
       }},
      {"grid.p",
       [](auto& c, auto k, auto v) {
         c.grid_p.clear();
         for (auto item : list(v)) c.grid_p.push_back(number<double>(k, item));
       }},
      {"grid.inter_band",
       [](auto& c, auto k, auto v) {
         c.grid_inter_band.clear();
         for (auto item : list(v)) c.grid_inter_band.push_back(boolean(k, item));
       }},
      {"grid.features",
       [](auto& c, auto, auto v) {
         c.grid_features.clear();
         for (auto item : list(v)) c.grid_features.push_back(data::parse_feature_kind(item));
       }},
      {"grid.repeats", [](auto& c, auto k, auto v) { c.repeats = number<int>(k, v); }},

      {"gradcheck.vertices", [](auto& c, auto k, auto v) { c.gradcheck_vertices = number<int>(k, v); }},
      {"gradcheck.p", [](auto& c, auto k, auto v) { c.gradcheck_p = number<double>(k, v); }},
      {"gradcheck.tolerance", [](auto& c, auto k, auto v) { c.gradcheck_tolerance = number<double>(k, v); }},
      {"gradcheck.floor", [](auto& c, auto k, auto v) { c.gradcheck_floor = number<double>(k, v); }},
      {"gradcheck.samples", [](auto& c, auto k, auto v) { c.gradcheck_samples = number<std::size_t>(k, v); }},

      {"output.dir", [](auto& c, auto, auto v) { c.out_dir = std::string(trim(v)); }},
  };
  return table;
}

}  // namespace

nn::NetworkSpec parse_network_spec(std::string_view text) {
  text = trim(text);
  if (text.size() == 4 && text.substr(0, 3) == "net" && text[3] >= '1' && text[3] <= '0' + nn::kPresetCount)
    return nn::preset(text[3] - '0');

  nn::NetworkSpec spec;
  std::size_t position = 0;
  std::size_t start = 0;
  while (true) {
    ++position;
    const auto dash = text.find('-', start);
    const auto token = trim(text.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start));
    const auto fail = [&](const std::string& why) {
      throw ParseError(position, "token " + std::to_string(position) + " '" + std::string(token) + "': " + why);
    };
    if (token.empty()) fail("empty token");

    int a = 0, b = 0;
    if (token.starts_with("GC")) {
      const auto m = token.find('M');
      if (m == std::string_view::npos || !parse_number(token.substr(2, m - 2), a) ||
          !parse_number(token.substr(m + 1), b))
        fail("expected GC<filters>M<order>");
      spec.layers.push_back(nn::LayerSpec::graph_conv(a, b));
    } else if (token.starts_with("FC")) {
      if (!parse_number(token.substr(2), a)) fail("expected FC<outputs>");
      spec.layers.push_back(nn::LayerSpec::dense(a));
    } else if (token.starts_with("P")) {
      if (!parse_number(token.substr(1), a)) fail("expected P<factor>");
      spec.layers.push_back(nn::LayerSpec::pool(a));
    } else {
      fail("unknown layer type");
    }
    const auto& l = spec.layers.back();
    if (l.size < 1 || (l.type == nn::LayerType::GraphConv && l.order < 1)) fail("sizes must be positive");
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ParseError(position, e.what());
  }
  return spec;
}

void set_option(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown option '" + std::string(key) + "'");
  it->second(config, key, value);
}

std::vector<std::string> option_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig config) {
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const auto prefix = section + ".";
      const auto keys = option_keys();
      if (std::none_of(keys.begin(), keys.end(), [&](const auto& k) { return k.starts_with(prefix); }))
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto full = section.empty() ? key : section + "." + key;
    try {
      set_option(config, full, trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw ConfigError(where + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void ExperimentConfig::validate() const {
  graph.validate();
  train.validate();
  network_spec();
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("data.train_ratio must be in (0, 1)");
  if (knn_k < 0) throw ConfigError("train.knn_k must be >= 0");
  if (fir_order < 2) throw ConfigError("data.fir_order must be >= 2");
  if (repeats < 1) throw ConfigError("grid.repeats must be >= 1");
  if (gradcheck_vertices < 2) throw ConfigError("gradcheck.vertices must be >= 2");
  if (!(gradcheck_floor > 0.0)) throw ConfigError("gradcheck.floor must be positive");
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["data"] = {{"path", dataset},
               {"feature", data::to_string(feature)},
               {"subject", subject},
               {"subtract_baseline", subtract_baseline},
               {"split", split_mode == SplitMode::Segment ? "segment" : "trial"},
               {"train_ratio", train_ratio},
               {"split_seed", split_seed},
               {"fir_coeffs", fir_coeffs},
               {"fir_order", fir_order}};
  j["graph"] = {{"method", graph::to_string(graph.method)},
                {"k", graph.k},
                {"p", graph.p},
                {"sigma", graph.sigma},
                {"inter_band", graph.inter_band},
                {"seed", graph.seed}};
  j["network"] = {{"spec", network_spec().to_string()}, {"coarsen_seed", coarsen_seed}};
  j["train"] = {{"epochs", train.epochs},         {"lr", train.initial_lr},
                {"lr_decay", train.lr_decay},     {"l2", train.l2_coef},
                {"batch_size", train.batch_size}, {"seed", train.seed},
                {"knn_k", knn_k}};
  return j.dump();
}

}  // namespace eeggcn::cli
