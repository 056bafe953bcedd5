#pragma once

#include <span>
#include <vector>

#include "eeggcn/linalg.hpp"

namespace eeggcn::nn {

// Rows are samples. Euclidean distance, majority vote over the k nearest
// (distance ties by training index), vote ties by smallest class.
std::vector<int> knn_predict(const Matrix& train, std::span<const int> train_labels, const Matrix& queries, int k);

double knn_accuracy(const Matrix& train, std::span<const int> train_labels, const Matrix& test,
                    std::span<const int> test_labels, int k);

}  // namespace eeggcn::nn
