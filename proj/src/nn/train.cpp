#include "eeggcn/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "eeggcn/error.hpp"
#include "eeggcn/nn/layers.hpp"

namespace eeggcn::nn {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(initial_lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("lr decay must lie in (0, 1]");
  if (!(l2_coef >= 0.0)) throw ConfigError("l2 coefficient must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

double TrainConfig::lr_at(int epoch) const { return initial_lr * std::pow(lr_decay, epoch); }

TrainResult train(const Gcnn& model, ModelParams params, std::span<const GraphSample> samples,
                  const TrainConfig& config, std::span<const GraphSample> monitor, const EpochCallback& on_epoch) {
  config.validate();
  if (samples.empty()) throw ConfigError("training needs at least one sample");

  TrainResult result{std::move(params), AdamState(model.layout().total()), {}};
  auto& p = result.params;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ForwardCache cache;
  Vector grad(model.layout().total());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const double lr = config.lr_at(epoch);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const auto batch = static_cast<double>(end - begin);
      grad.setZero();
      double batch_loss = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const auto& s = samples[order[k]];
        const Vector logits = model.forward(p, s.signal, &cache);
        auto ce = softmax_cross_entropy(logits, s.label);
        batch_loss += ce.loss;
        correct += argmax(logits) == s.label;
        model.backward(p, cache, ce.grad, grad);
      }
      grad /= batch;
      const double penalty = l2_penalty(p, config.l2_coef, &grad);
      loss_sum += batch_loss + penalty * batch;
      try {
        adam_step(p.values, grad, result.optimizer, lr);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batches) + ")");
      }
      ++batches;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    m.train_loss = loss_sum / static_cast<double>(samples.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    if (!monitor.empty()) m.test_accuracy = evaluate(model, p, monitor);
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(m.train_loss))
      throw NumericError("training loss became non-finite in epoch " + std::to_string(epoch));
    result.epochs.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return result;
}

double evaluate(const Gcnn& model, const ModelParams& params, std::span<const GraphSample> samples) {
  if (samples.empty()) throw ConfigError("evaluation needs at least one sample");
  std::size_t correct = 0;
  ForwardCache cache;
  for (const auto& s : samples) correct += argmax(model.forward(params, s.signal, &cache)) == s.label;
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace eeggcn::nn
