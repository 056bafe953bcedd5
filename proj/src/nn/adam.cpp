#include "eeggcn/nn/adam.hpp"

#include <cmath>

#include "eeggcn/error.hpp"

namespace eeggcn::nn {

void adam_step(Vector& params, const Vector& grads, AdamState& state, double lr) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw ShapeError("adam: parameter, gradient and moment sizes differ");
  if (!grads.allFinite()) throw NumericError("adam: non-finite gradient");
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.epsilon);
}

double l2_penalty(const ModelParams& params, double l2_coef, Vector* grad) {
  if (l2_coef < 0.0) throw ConfigError("l2 coefficient must be >= 0");
  if (l2_coef == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& slot : params.layout.slots()) {
    if (!slot.regularized) continue;
    const auto w = params.values.segment(slot.offset, slot.size());
    sum += w.squaredNorm();
    if (grad) grad->segment(slot.offset, slot.size()) += l2_coef * w;
  }
  return 0.5 * l2_coef * sum;
}

}  // namespace eeggcn::nn
