#include "eeggcn/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "eeggcn/error.hpp"
#include "eeggcn/nn/network_spec.hpp"

namespace eeggcn::nn {
namespace {

using nlohmann::json;

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

json layer_json(const LayerSpec& l) {
  switch (l.type) {
    case LayerType::GraphConv: return {{"type", "GC"}, {"filters", l.size}, {"order", l.order}};
    case LayerType::Pool: return {{"type", "P"}, {"size", l.size}};
    case LayerType::Dense: return {{"type", "FC"}, {"outputs", l.size}};
  }
  return {};
}

LayerSpec layer_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "GC") return LayerSpec::graph_conv(j.at("filters").get<int>(), j.at("order").get<int>());
  if (type == "P") return LayerSpec::pool(j.at("size").get<int>());
  if (type == "FC") return LayerSpec::dense(j.at("outputs").get<int>());
  throw LoadError("checkpoint: unknown layer type '" + type + "'");
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (ckpt.params.values.size() != ckpt.params.layout.total())
    throw ShapeError("checkpoint: parameter vector does not match its layout");
  json header;
  header["format"] = kCheckpointMagic;
  header["spec"] = ckpt.spec.to_string();
  header["layers"] = json::array();
  for (const auto& l : ckpt.spec.layers) header["layers"].push_back(layer_json(l));
  header["tensors"] = json::array();
  for (const auto& s : ckpt.params.layout.slots())
    header["tensors"].push_back({{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}, {"regularized", s.regularized}});
  header["total"] = ckpt.params.layout.total();
  header["seed"] = ckpt.seed;
  header["epoch"] = ckpt.epoch;
  header["config"] = json::parse(ckpt.config_json);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot open " + path.string() + " for writing");
  out << kCheckpointMagic << '\n' << header.dump() << '\n';
  for (Index i = 0; i < ckpt.params.values.size(); ++i) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(ckpt.params.values[i]));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw LoadError("write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  std::string magic, line;
  if (!std::getline(in, magic) || magic != kCheckpointMagic)
    throw LoadError(path.string() + ": not a checkpoint (bad magic)");
  if (!std::getline(in, line)) throw LoadError(path.string() + ": missing header");

  Checkpoint ckpt;
  try {
    const json header = json::parse(line);
    for (const auto& l : header.at("layers")) ckpt.spec.layers.push_back(layer_from_json(l));
    ckpt.spec.validate();
    for (const auto& t : header.at("tensors"))
      ckpt.params.layout.add(t.at("name").get<std::string>(), t.at("rows").get<Index>(), t.at("cols").get<Index>(),
                             t.at("regularized").get<bool>());
    if (header.at("total").get<Index>() != ckpt.params.layout.total())
      throw LoadError(path.string() + ": tensor shapes disagree with total");
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.epoch = header.at("epoch").get<int>();
    ckpt.config_json = header.at("config").dump();
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": malformed header: " + e.what());
  }

  const Index n = ckpt.params.layout.total();
  ckpt.params.values.resize(n);
  for (Index i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
      throw LoadError(path.string() + ": truncated after " + std::to_string(i) + " of " + std::to_string(n) +
                      " parameters");
    ckpt.params.values[i] = std::bit_cast<double>(to_le(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw LoadError(path.string() + ": trailing bytes");
  return ckpt;
}

}  // namespace eeggcn::nn
