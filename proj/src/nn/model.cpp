#include "eeggcn/nn/model.hpp"

#include <cmath>
#include <random>

#include "eeggcn/error.hpp"
#include "eeggcn/graph.hpp"

namespace eeggcn::nn {

std::vector<GraphLevel> levels_from_hierarchy(const coarsen::CoarseningHierarchy& h, int count) {
  if (count < 1 || static_cast<std::size_t>(count) > h.levels.size())
    throw ConfigError("hierarchy has " + std::to_string(h.levels.size()) + " levels, network needs " +
                      std::to_string(count));
  std::vector<GraphLevel> out;
  for (int l = 0; l < count; ++l) {
    const auto laplacian = graph::normalized_laplacian(h.levels[static_cast<std::size_t>(l)]);
    GraphLevel level;
    level.scaled_laplacian = graph::scale_laplacian(laplacian);
    const auto& fake = h.fake[static_cast<std::size_t>(l)];
    level.mask.resize(static_cast<Index>(fake.size()));
    for (std::size_t s = 0; s < fake.size(); ++s) level.mask[static_cast<Index>(s)] = fake[s] ? 0.0 : 1.0;
    out.push_back(std::move(level));
  }
  return out;
}

int argmax(const Vector& v) {
  int best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = static_cast<int>(i);
  }
  return best;
}

Gcnn::Gcnn(NetworkSpec spec, std::vector<GraphLevel> levels, Index input_features)
    : spec_(std::move(spec)), levels_(std::move(levels)), input_features_(input_features) {
  spec_.validate();
  if (input_features_ < 1) throw ConfigError("input feature count must be >= 1");
  if (levels_.size() < static_cast<std::size_t>(spec_.pool_count()) + 1)
    throw ConfigError("network needs " + std::to_string(spec_.pool_count() + 1) + " graph levels, got " +
                      std::to_string(levels_.size()));
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const auto& g = levels_[l];
    if (g.scaled_laplacian.rows() != g.scaled_laplacian.cols() || g.mask.size() != g.size())
      throw ShapeError("graph level " + std::to_string(l) + " is inconsistent");
    if (l > 0 && levels_[l - 1].size() != 2 * g.size())
      throw ShapeError("padded level sizes must halve at every level");
  }

  Index features = input_features_;
  std::size_t level = 0;
  int conv_index = 0;
  for (const auto& l : spec_.layers) {
    Stage st{l.type};
    st.level = level;
    st.in_features = features;
    switch (l.type) {
      case LayerType::GraphConv: {
        ++conv_index;
        const auto tag = "gc" + std::to_string(conv_index);
        st.order = l.order;
        st.out_features = l.size;
        st.weight_slot = layout_.add(tag + ".theta", static_cast<Index>(l.order) * features, l.size, true);
        st.bias_slot = layout_.add(tag + ".bias", 1, l.size, false);
        features = l.size;
        break;
      }
      case LayerType::Pool:
        st.out_features = features;
        ++level;
        break;
      case LayerType::Dense:
        st.in_features = levels_[level].size() * features;
        st.out_features = l.size;
        st.weight_slot = layout_.add("fc.weight", st.in_features, l.size, true);
        st.bias_slot = layout_.add("fc.bias", 1, l.size, false);
        break;
    }
    stages_.push_back(st);
  }
}

std::vector<Index> Gcnn::padded_sizes() const {
  std::vector<Index> out;
  for (const auto& l : levels_) out.push_back(l.size());
  return out;
}

ModelParams Gcnn::init_params(std::uint64_t seed) const {
  ModelParams params{layout_, Vector::Zero(layout_.total())};
  std::mt19937_64 rng(seed);
  for (const auto& st : stages_) {
    if (st.type == LayerType::Pool) continue;
    const auto& slot = layout_.slot(st.weight_slot);
    const double fan = st.type == LayerType::GraphConv
                           ? static_cast<double>(st.order * st.in_features + st.out_features)
                           : static_cast<double>(st.in_features + st.out_features);
    const double limit = std::sqrt(6.0 / fan);
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto w = params.tensor(st.weight_slot);
    for (Index i = 0; i < slot.rows; ++i)
      for (Index j = 0; j < slot.cols; ++j) w(i, j) = dist(rng);
  }
  return params;
}

void Gcnn::check_params(const ModelParams& params) const {
  if (!(params.layout == layout_)) throw ShapeError("parameter layout does not match the network");
}

Vector Gcnn::forward(const ModelParams& params, const Matrix& x, ForwardCache* cache) const {
  check_params(params);
  if (x.rows() != input_vertices() || x.cols() != input_features_)
    throw ShapeError("input must be " + std::to_string(input_vertices()) + " x " + std::to_string(input_features_));

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.layers.resize(stages_.size());
  Matrix h = x;
  Matrix y;
  Vector logits;
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    const auto& st = stages_[s];
    auto& lc = c.layers[s];
    switch (st.type) {
      case LayerType::GraphConv: {
        const auto& level = levels_[st.level];
        detail::chebconv_apply(h, level.scaled_laplacian, params.tensor(st.weight_slot),
                               params.tensor(st.bias_slot).row(0).transpose(), st.order, lc.conv, lc.pre);
        h = lc.pre.cwiseMax(0.0);
        h.array().colwise() *= level.mask.array();
        break;
      }
      case LayerType::Pool:
        h = graph_maxpool2(h, &lc.pool);
        break;
      case LayerType::Dense: {
        // vertex-major flattening: index v * F + f
        c.flat.resize(h.size());
        Eigen::Map<RowMatrix>(c.flat.data(), h.rows(), h.cols()) = h;
        logits = params.tensor(st.weight_slot).transpose() * c.flat;
        logits += params.tensor(st.bias_slot).row(0).transpose();
        break;
      }
    }
  }
  c.valid = true;
  return logits;
}

void Gcnn::backward(const ModelParams& params, const ForwardCache& cache, const Vector& grad_logits, Vector& grad,
                    Matrix* grad_input) const {
  if (!cache.valid) throw UsageError("backward called without a forward cache");
  check_params(params);
  if (grad.size() != layout_.total()) throw ShapeError("gradient vector does not match the parameter layout");
  if (grad_logits.size() != num_classes()) throw ShapeError("logit gradient has the wrong length");

  Matrix g;  // gradient w.r.t. the output of the current stage
  for (std::size_t s = stages_.size(); s-- > 0;) {
    const auto& st = stages_[s];
    const auto& lc = cache.layers[s];
    switch (st.type) {
      case LayerType::Dense: {
        auto gw = view(grad, layout_.slot(st.weight_slot));
        gw.noalias() += cache.flat * grad_logits.transpose();
        view(grad, layout_.slot(st.bias_slot)).row(0) += grad_logits.transpose();
        const Vector gflat = params.tensor(st.weight_slot) * grad_logits;
        const Index rows = levels_[st.level].size();
        g = Eigen::Map<const RowMatrix>(gflat.data(), rows, st.in_features / rows);
        break;
      }
      case LayerType::Pool:
        g = graph_maxpool2_backward(g, lc.pool);
        break;
      case LayerType::GraphConv: {
        const auto& level = levels_[st.level];
        g.array().colwise() *= level.mask.array();
        g = (lc.pre.array() > 0.0).select(g, 0.0);
        const bool need_input = s > 0 || grad_input != nullptr;
        Matrix gx;
        auto gw = view(grad, layout_.slot(st.weight_slot));
        auto gb = view(grad, layout_.slot(st.bias_slot));
        Eigen::Map<Vector> gb_vec(gb.data(), gb.cols());
        detail::chebconv_accumulate(g, lc.conv, level.scaled_laplacian, params.tensor(st.weight_slot), st.order,
                                    gw, gb_vec, need_input ? &gx : nullptr);
        if (need_input) g = std::move(gx);
        break;
      }
    }
  }
  if (grad_input) *grad_input = g;
}

int Gcnn::predict(const ModelParams& params, const Matrix& x) const { return argmax(forward(params, x)); }

}  // namespace eeggcn::nn
