#pragma once

#include <cstdint>
#include <vector>

#include "eeggcn/coarsen.hpp"
#include "eeggcn/nn/layers.hpp"
#include "eeggcn/nn/network_spec.hpp"
#include "eeggcn/nn/params.hpp"

namespace eeggcn::nn {

// One pooling level of the network: the scaled Laplacian of the padded graph
// and a 0/1 mask that is 0 on fake vertices.
struct GraphLevel {
  SparseMatrix scaled_laplacian;
  Vector mask;

  Index size() const { return scaled_laplacian.rows(); }
};

// Scaled Laplacians for levels 0..count-1 of a hierarchy.
std::vector<GraphLevel> levels_from_hierarchy(const coarsen::CoarseningHierarchy& h, int count);

struct LayerCache {
  ChebConvCache conv;
  Matrix pre;     // pre-activation of a GC layer
  PoolCache pool;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Vector flat;  // FC input
  bool valid = false;
};

// GCNN on a fixed coarsening hierarchy: every GC layer is followed by ReLU and
// the fake-vertex mask; P2 is max-pooling over consecutive slots; the final
// FC reads the vertex-major flattening of the last feature map.
class Gcnn {
 public:
  Gcnn(NetworkSpec spec, std::vector<GraphLevel> levels, Index input_features = 1);

  const NetworkSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  const std::vector<GraphLevel>& levels() const { return levels_; }
  Index input_vertices() const { return levels_.front().size(); }
  Index input_features() const { return input_features_; }
  int num_classes() const { return spec_.num_classes(); }
  std::vector<Index> padded_sizes() const;

  // Uniform +-sqrt(6 / (M F_in + F_out)) for theta, +-sqrt(6 / (fan_in + fan_out))
  // for FC, zero biases.
  ModelParams init_params(std::uint64_t seed) const;

  // x: input_vertices() x input_features(), in padded slot order.
  Vector forward(const ModelParams& params, const Matrix& x, ForwardCache* cache = nullptr) const;

  // Accumulates d(loss)/d(params) into grad (same layout); writes the input
  // gradient when grad_input is non-null.
  void backward(const ModelParams& params, const ForwardCache& cache, const Vector& grad_logits, Vector& grad,
                Matrix* grad_input = nullptr) const;

  int predict(const ModelParams& params, const Matrix& x) const;

 private:
  struct Stage {
    LayerType type;
    int order = 0;
    std::size_t level = 0;
    Index in_features = 0;
    Index out_features = 0;
    std::size_t weight_slot = 0;
    std::size_t bias_slot = 0;
  };

  void check_params(const ModelParams& params) const;

  NetworkSpec spec_;
  std::vector<GraphLevel> levels_;
  Index input_features_;
  ParamLayout layout_;
  std::vector<Stage> stages_;
};

// Smallest index among maximal entries.
int argmax(const Vector& v);

}  // namespace eeggcn::nn
