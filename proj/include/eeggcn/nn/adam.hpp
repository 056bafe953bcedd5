#pragma once

#include "eeggcn/nn/params.hpp"

namespace eeggcn::nn {

struct AdamState {
  Vector m;
  Vector v;
  long long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(Index size = 0) : m(Vector::Zero(size)), v(Vector::Zero(size)) {}
};

// Bias-corrected Adam. Throws NumericError on non-finite gradients.
void adam_step(Vector& params, const Vector& grads, AdamState& state, double lr);

// Adds l2_coef * 0.5 * sum(w^2) over regularized tensors; accumulates
// l2_coef * w into grad when non-null. Returns the penalty.
double l2_penalty(const ModelParams& params, double l2_coef, Vector* grad = nullptr);

}  // namespace eeggcn::nn
