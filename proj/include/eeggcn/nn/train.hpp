#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "eeggcn/nn/adam.hpp"
#include "eeggcn/nn/model.hpp"

namespace eeggcn::nn {

struct GraphSample {
  Matrix signal;  // padded level-0 vertices x input features
  int label = 0;
};

struct TrainConfig {
  int epochs = 30;
  double initial_lr = 0.001;
  double lr_decay = 0.95;
  double l2_coef = 5e-4;
  int batch_size = 64;
  std::uint64_t seed = 1;

  void validate() const;
  double lr_at(int epoch) const;
};

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;  // mean cross-entropy plus the L2 term, before each step
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
  double seconds = 0.0;
};

struct TrainResult {
  ModelParams params;
  AdamState optimizer;
  std::vector<EpochMetrics> epochs;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Shuffled mini-batch Adam with lr = initial_lr * lr_decay^epoch. Batch
// gradients are reduced in sample order, so results are bitwise reproducible.
// When `monitor` is non-empty its accuracy is recorded after every epoch.
TrainResult train(const Gcnn& model, ModelParams params, std::span<const GraphSample> samples,
                  const TrainConfig& config, std::span<const GraphSample> monitor = {},
                  const EpochCallback& on_epoch = {});

double evaluate(const Gcnn& model, const ModelParams& params, std::span<const GraphSample> samples);

}  // namespace eeggcn::nn
