#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "eeggcn/nn/model.hpp"

namespace eeggcn::nn {

struct GradCheckOptions {
  double step = 1e-6;       // central difference step
  double tolerance = 1e-5;  // on the relative error below
  // Relative error is |a - n| / max(|a|, |n|, abs_floor). The floor sits above
  // the round-off of a central difference of an O(1) loss at this step.
  double abs_floor = 1e-3;
  // 0 checks every entry; otherwise a seeded sample of this many per tensor.
  std::size_t max_per_tensor = 0;
  bool check_input = true;
  double l2_coef = 0.0;
  // Inputs are re-jittered when a real pre-activation sits this close to the
  // ReLU kink.
  double kink_threshold = 1e-7;
  int max_retries = 8;
  std::uint64_t seed = 7;
  // Applied to the analytic gradient before comparison (negative controls).
  std::function<void(Vector&)> gradient_hook;
};

struct TensorCheck {
  std::string name;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  bool passed = false;
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  int retries = 0;
  std::vector<TensorCheck> tensors;  // parameters, then "input" when checked
};

GradCheckReport grad_check(const Gcnn& model, const ModelParams& params, Matrix x, int label,
                           const GradCheckOptions& options = {});

}  // namespace eeggcn::nn
