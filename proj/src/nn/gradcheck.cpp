#include "eeggcn/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eeggcn/error.hpp"
#include "eeggcn/nn/adam.hpp"
#include "eeggcn/nn/layers.hpp"

namespace eeggcn::nn {
namespace {

double objective(const Gcnn& model, const ModelParams& params, const Matrix& x, int label, double l2_coef) {
  return softmax_cross_entropy(model.forward(params, x), label).loss + l2_penalty(params, l2_coef);
}

bool near_kink(const Gcnn& model, const ForwardCache& cache, double threshold) {
  std::size_t level = 0;
  const auto& layers = model.spec().layers;
  for (std::size_t s = 0; s < layers.size(); ++s) {
    if (layers[s].type == LayerType::Pool) ++level;
    if (layers[s].type != LayerType::GraphConv) continue;
    const auto& pre = cache.layers[s].pre;
    const auto& mask = model.levels()[level].mask;
    for (Index r = 0; r < pre.rows(); ++r) {
      if (mask[r] == 0.0) continue;
      if ((pre.row(r).array().abs() < threshold).any()) return true;
    }
  }
  return false;
}

std::vector<Index> pick(Index size, std::size_t limit, std::mt19937_64& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(size));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (limit == 0 || idx.size() <= limit) return idx;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double relative_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

}  // namespace

GradCheckReport grad_check(const Gcnn& model, const ModelParams& params, Matrix x, int label,
                           const GradCheckOptions& options) {
  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 1e-2);

  ForwardCache cache;
  Vector logits = model.forward(params, x, &cache);
  while (near_kink(model, cache, options.kink_threshold)) {
    if (report.retries >= options.max_retries) break;
    ++report.retries;
    for (Index r = 0; r < x.rows(); ++r) {
      if (model.levels().front().mask[r] == 0.0) continue;
      for (Index c = 0; c < x.cols(); ++c) x(r, c) += jitter(rng);
    }
    logits = model.forward(params, x, &cache);
  }

  const auto ce = softmax_cross_entropy(logits, label);
  Vector analytic = Vector::Zero(model.layout().total());
  Matrix grad_input;
  model.backward(params, cache, ce.grad, analytic, &grad_input);
  l2_penalty(params, options.l2_coef, &analytic);
  if (options.gradient_hook) options.gradient_hook(analytic);

  const double h = options.step;
  ModelParams probe = params;
  for (const auto& slot : model.layout().slots()) {
    TensorCheck tc{slot.name};
    for (Index k : pick(slot.size(), options.max_per_tensor, rng)) {
      const Index i = slot.offset + k;
      const double saved = probe.values[i];
      probe.values[i] = saved + h;
      const double up = objective(model, probe, x, label, options.l2_coef);
      probe.values[i] = saved - h;
      const double down = objective(model, probe, x, label, options.l2_coef);
      probe.values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[i], numeric, options.abs_floor);
      if (err > tc.max_relative_error || tc.worst_index < 0) {
        tc.max_relative_error = err;
        tc.worst_index = k;
        tc.analytic = analytic[i];
        tc.numeric = numeric;
      }
      ++tc.checked;
    }
    report.tensors.push_back(tc);
  }

  if (options.check_input) {
    TensorCheck tc{"input"};
    Matrix probe_x = x;
    for (Index k : pick(x.size(), options.max_per_tensor, rng)) {
      const Index r = k / x.cols(), c = k % x.cols();
      const double saved = probe_x(r, c);
      probe_x(r, c) = saved + h;
      const double up = objective(model, params, probe_x, label, options.l2_coef);
      probe_x(r, c) = saved - h;
      const double down = objective(model, params, probe_x, label, options.l2_coef);
      probe_x(r, c) = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(grad_input(r, c), numeric, options.abs_floor);
      if (err > tc.max_relative_error || tc.worst_index < 0) {
        tc.max_relative_error = err;
        tc.worst_index = k;
        tc.analytic = grad_input(r, c);
        tc.numeric = numeric;
      }
      ++tc.checked;
    }
    report.tensors.push_back(tc);
  }

  for (const auto& tc : report.tensors) {
    report.checked += tc.checked;
    report.max_relative_error = std::max(report.max_relative_error, tc.max_relative_error);
  }
  report.passed = report.max_relative_error <= options.tolerance;
  return report;
}

}  // namespace eeggcn::nn
