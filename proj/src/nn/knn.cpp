#include "eeggcn/nn/knn.hpp"

#include <algorithm>

#include "eeggcn/error.hpp"

namespace eeggcn::nn {

std::vector<int> knn_predict(const Matrix& train, std::span<const int> train_labels, const Matrix& queries, int k) {
  if (train.rows() == 0) throw ConfigError("k-NN needs a non-empty training set");
  if (static_cast<std::size_t>(train.rows()) != train_labels.size()) throw ShapeError("k-NN: label count mismatch");
  if (k < 1 || k > train.rows()) throw ConfigError("k-NN: k must lie in [1, training size]");
  if (queries.cols() != train.cols()) throw ShapeError("k-NN: feature dimension mismatch");

  const int max_label = *std::max_element(train_labels.begin(), train_labels.end());
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(train.rows()));
  std::vector<int> votes(static_cast<std::size_t>(max_label) + 1);
  for (Index q = 0; q < queries.rows(); ++q) {
    for (Index i = 0; i < train.rows(); ++i)
      dist[static_cast<std::size_t>(i)] = {(train.row(i) - queries.row(q)).squaredNorm(), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (int j = 0; j < k; ++j) ++votes[static_cast<std::size_t>(train_labels[dist[j].second])];
    out.push_back(static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin()));
  }
  return out;
}

double knn_accuracy(const Matrix& train, std::span<const int> train_labels, const Matrix& test,
                    std::span<const int> test_labels, int k) {
  if (static_cast<std::size_t>(test.rows()) != test_labels.size()) throw ShapeError("k-NN: label count mismatch");
  if (test.rows() == 0) throw ConfigError("k-NN needs a non-empty test set");
  const auto pred = knn_predict(train, train_labels, test, k);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test_labels[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace eeggcn::nn
