#include "eeggcn/nn/network_spec.hpp"

#include "eeggcn/error.hpp"

namespace eeggcn::nn {

std::string LayerSpec::to_string() const {
  switch (type) {
    case LayerType::GraphConv: return "GC" + std::to_string(size) + "M" + std::to_string(order);
    case LayerType::Pool: return "P" + std::to_string(size);
    case LayerType::Dense: return "FC" + std::to_string(size);
  }
  return "?";
}

void NetworkSpec::validate() const {
  if (layers.empty() || layers.back().type != LayerType::Dense)
    throw ConfigError("network must end with exactly one FC layer");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.type == LayerType::Dense && i + 1 != layers.size())
      throw ConfigError("FC is only supported as the final layer");
    if (l.size < 1) throw ConfigError("layer " + l.to_string() + " needs a positive size");
    if (l.type == LayerType::GraphConv && l.order < 1)
      throw ConfigError("layer " + l.to_string() + " needs a polynomial order >= 1");
    if (l.type == LayerType::Pool && l.size != 2)
      throw ConfigError("only P2 pooling is supported (got " + l.to_string() + ")");
  }
}

int NetworkSpec::pool_count() const {
  int n = 0;
  for (const auto& l : layers) n += l.type == LayerType::Pool;
  return n;
}

int NetworkSpec::num_classes() const {
  if (layers.empty() || layers.back().type != LayerType::Dense) return 0;
  return layers.back().size;
}

std::string NetworkSpec::to_string() const {
  std::string out;
  for (const auto& l : layers) {
    if (!out.empty()) out += " - ";
    out += l.to_string();
  }
  return out;
}

NetworkSpec preset(int number) {
  using L = LayerSpec;
  switch (number) {
    case 1:
      return {{L::graph_conv(64, 16), L::graph_conv(64, 16), L::pool(2), L::dense(40)}};
    case 2:
      return {{L::graph_conv(64, 16), L::graph_conv(64, 16), L::pool(2), L::graph_conv(128, 9),
               L::graph_conv(128, 9), L::pool(2), L::dense(40)}};
    case 3:
      return {{L::graph_conv(64, 9), L::graph_conv(64, 9), L::pool(2), L::graph_conv(128, 4),
               L::graph_conv(128, 4), L::pool(2), L::dense(40)}};
    case 4:
      return {{L::graph_conv(64, 4), L::graph_conv(64, 4), L::pool(2), L::graph_conv(128, 3),
               L::graph_conv(128, 3), L::pool(2), L::dense(40)}};
    case 5:
      return {{L::graph_conv(64, 16), L::graph_conv(64, 16), L::pool(2), L::graph_conv(128, 9),
               L::graph_conv(128, 9), L::pool(2), L::graph_conv(256, 4), L::graph_conv(256, 4),
               L::pool(2), L::dense(40)}};
    default:
      throw ConfigError("network preset must be 1.." + std::to_string(kPresetCount));
  }
}

long long count_parameters(const NetworkSpec& spec, const std::vector<Index>& padded_sizes,
                           int input_features) {
  spec.validate();
  if (padded_sizes.size() < static_cast<std::size_t>(spec.pool_count()) + 1)
    throw ConfigError("not enough coarsening levels for " + std::to_string(spec.pool_count()) +
                      " pooling layers");
  long long total = 0;
  long long features = input_features;
  std::size_t level = 0;
  for (const auto& l : spec.layers) {
    switch (l.type) {
      case LayerType::GraphConv:
        total += static_cast<long long>(l.order) * features * l.size + l.size;
        features = l.size;
        break;
      case LayerType::Pool:
        ++level;
        break;
      case LayerType::Dense:
        total += static_cast<long long>(padded_sizes[level]) * features * l.size + l.size;
        break;
    }
  }
  return total;
}

}  // namespace eeggcn::nn
