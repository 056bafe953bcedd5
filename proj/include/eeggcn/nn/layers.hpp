#pragma once

#include <vector>

#include "eeggcn/linalg.hpp"

namespace eeggcn::nn {

using ThetaRef = Eigen::Ref<const RowMatrix>;  // (M * F_in) x F_out, row m * F_in + i

// --- Chebyshev graph convolution -----------------------------------------

struct ChebConvCache {
  Matrix basis;  // vertices x (M * F_in): [T_0 X | T_1 X | ...]
  bool valid = false;
};

// Y = sum_m T_m(L_s) X theta_m + bias. Throws ShapeError / NumericError.
Matrix chebconv_forward(const Matrix& x, const SparseMatrix& scaled, const ThetaRef& theta,
                        const Eigen::Ref<const Vector>& bias, int order, ChebConvCache* cache = nullptr);

struct ChebConvGrads {
  Matrix grad_x;
  RowMatrix grad_theta;
  Vector grad_bias;
};

// Throws UsageError when the cache was not filled by a forward pass.
ChebConvGrads chebconv_backward(const Matrix& grad_y, const ChebConvCache& cache, const SparseMatrix& scaled,
                                const ThetaRef& theta, int order);

namespace detail {
void chebconv_apply(const Matrix& x, const SparseMatrix& scaled, const ThetaRef& theta,
                    const Eigen::Ref<const Vector>& bias, int order, ChebConvCache& cache, Matrix& y);
// Accumulates into grad_theta / grad_bias; writes grad_x when non-null.
void chebconv_accumulate(const Matrix& grad_y, const ChebConvCache& cache, const SparseMatrix& scaled,
                         const ThetaRef& theta, int order, Eigen::Ref<RowMatrix> grad_theta,
                         Eigen::Ref<Vector> grad_bias, Matrix* grad_x);
}  // namespace detail

// --- activation / pooling -------------------------------------------------

Matrix relu(const Matrix& x);
// grad * 1[pre > 0]
Matrix relu_backward(const Matrix& grad, const Matrix& pre);

struct PoolCache {
  std::vector<Index> argmax;  // winning input row per output entry, column-major
  Index input_rows = 0;
  bool valid = false;
};

// out[j] = max(x[2j], x[2j+1]) per column, ties to the even row.
Matrix graph_maxpool2(const Matrix& x, PoolCache* cache = nullptr);
Matrix graph_maxpool2_backward(const Matrix& grad_out, const PoolCache& cache);

// --- dense head -----------------------------------------------------------

// logits = W^T x + b, W is inputs x outputs.
Vector fc_forward(const Vector& x, const ThetaRef& weight, const Eigen::Ref<const Vector>& bias);

struct FcGrads {
  Vector grad_x;
  RowMatrix grad_weight;
  Vector grad_bias;
};
FcGrads fc_backward(const Vector& grad_logits, const Vector& x, const ThetaRef& weight);

// --- loss -----------------------------------------------------------------

struct LossResult {
  double loss = 0.0;
  Vector grad;
};

LossResult softmax_cross_entropy(const Vector& logits, int label);

}  // namespace eeggcn::nn
