#include "eeggcn/nn/layers.hpp"

#include <cmath>

#include "eeggcn/error.hpp"
#include "eeggcn/graph.hpp"

namespace eeggcn::nn {

namespace detail {

void chebconv_apply(const Matrix& x, const SparseMatrix& scaled, const ThetaRef& theta,
                    const Eigen::Ref<const Vector>& bias, int order, ChebConvCache& cache, Matrix& y) {
  graph::cheb_basis_packed(scaled, x, order, cache.basis);
  cache.valid = true;
  y.noalias() = cache.basis * theta;
  y.rowwise() += bias.transpose();
}

void chebconv_accumulate(const Matrix& grad_y, const ChebConvCache& cache, const SparseMatrix& scaled,
                         const ThetaRef& theta, int order, Eigen::Ref<RowMatrix> grad_theta,
                         Eigen::Ref<Vector> grad_bias, Matrix* grad_x) {
  if (!cache.valid) throw UsageError("chebconv backward called without a forward cache");
  grad_theta.noalias() += cache.basis.transpose() * grad_y;
  grad_bias += grad_y.colwise().sum().transpose();
  if (grad_x == nullptr) return;

  // d/dX of sum_m T_m X theta_m is sum_m T_m G_m with G = grad_y theta^T,
  // evaluated with Clenshaw's recurrence since every T_m(L_s) is symmetric.
  const Index f = theta.rows() / order;
  const Matrix g = grad_y * theta.transpose();
  if (order == 1) {
    *grad_x = g;
    return;
  }
  Matrix b_next = g.middleCols((order - 1) * f, f);  // b_{M-1}
  Matrix b_next2 = Matrix::Zero(g.rows(), f);         // b_M
  Matrix tmp(g.rows(), f);
  for (int k = order - 2; k >= 1; --k) {
    tmp.noalias() = scaled * b_next;
    tmp *= 2.0;
    tmp += g.middleCols(k * f, f);
    tmp -= b_next2;
    b_next2.swap(b_next);
    b_next.swap(tmp);
  }
  grad_x->noalias() = scaled * b_next;
  *grad_x += g.leftCols(f);
  *grad_x -= b_next2;
}

}  // namespace detail

namespace {

void check_conv_shapes(const Matrix& x, const SparseMatrix& scaled, const ThetaRef& theta, Index bias_size,
                       int order) {
  if (order < 1) throw ShapeError("chebconv: polynomial order must be >= 1");
  if (scaled.rows() != scaled.cols() || x.rows() != scaled.rows())
    throw ShapeError("chebconv: signal rows do not match the Laplacian");
  if (theta.rows() != static_cast<Index>(order) * x.cols())
    throw ShapeError("chebconv: theta rows must equal order * input features");
  if (bias_size != theta.cols()) throw ShapeError("chebconv: bias length must equal output features");
}

}  // namespace

Matrix chebconv_forward(const Matrix& x, const SparseMatrix& scaled, const ThetaRef& theta,
                        const Eigen::Ref<const Vector>& bias, int order, ChebConvCache* cache) {
  check_conv_shapes(x, scaled, theta, bias.size(), order);
  if (!theta.allFinite() || !bias.allFinite()) throw NumericError("chebconv: non-finite parameters");
  ChebConvCache local;
  Matrix y;
  detail::chebconv_apply(x, scaled, theta, bias, order, cache ? *cache : local, y);
  return y;
}

ChebConvGrads chebconv_backward(const Matrix& grad_y, const ChebConvCache& cache, const SparseMatrix& scaled,
                                const ThetaRef& theta, int order) {
  if (!cache.valid) throw UsageError("chebconv backward called without a forward cache");
  if (grad_y.cols() != theta.cols() || grad_y.rows() != cache.basis.rows())
    throw ShapeError("chebconv backward: gradient shape mismatch");
  ChebConvGrads out;
  out.grad_theta = RowMatrix::Zero(theta.rows(), theta.cols());
  out.grad_bias = Vector::Zero(theta.cols());
  detail::chebconv_accumulate(grad_y, cache, scaled, theta, order, out.grad_theta, out.grad_bias, &out.grad_x);
  return out;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& grad, const Matrix& pre) {
  if (grad.rows() != pre.rows() || grad.cols() != pre.cols()) throw ShapeError("relu backward shape mismatch");
  return (pre.array() > 0.0).select(grad, 0.0);
}

Matrix graph_maxpool2(const Matrix& x, PoolCache* cache) {
  if (x.rows() % 2 != 0) throw ShapeError("max-pool needs an even vertex count");
  const Index rows = x.rows() / 2;
  Matrix out(rows, x.cols());
  if (cache) {
    cache->argmax.resize(static_cast<std::size_t>(rows * x.cols()));
    cache->input_rows = x.rows();
    cache->valid = true;
  }
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index j = 0; j < rows; ++j) {
      const double a = x(2 * j, c), b = x(2 * j + 1, c);
      const bool odd = b > a;
      out(j, c) = odd ? b : a;
      if (cache) cache->argmax[static_cast<std::size_t>(c * rows + j)] = 2 * j + (odd ? 1 : 0);
    }
  }
  return out;
}

Matrix graph_maxpool2_backward(const Matrix& grad_out, const PoolCache& cache) {
  if (!cache.valid) throw UsageError("max-pool backward called without a forward cache");
  const Index rows = grad_out.rows();
  if (rows * 2 != cache.input_rows || static_cast<std::size_t>(rows * grad_out.cols()) != cache.argmax.size())
    throw ShapeError("max-pool backward shape mismatch");
  Matrix grad = Matrix::Zero(cache.input_rows, grad_out.cols());
  for (Index c = 0; c < grad_out.cols(); ++c)
    for (Index j = 0; j < rows; ++j) grad(cache.argmax[static_cast<std::size_t>(c * rows + j)], c) = grad_out(j, c);
  return grad;
}

Vector fc_forward(const Vector& x, const ThetaRef& weight, const Eigen::Ref<const Vector>& bias) {
  if (weight.rows() != x.size() || weight.cols() != bias.size()) throw ShapeError("fc: shape mismatch");
  return weight.transpose() * x + bias;
}

FcGrads fc_backward(const Vector& grad_logits, const Vector& x, const ThetaRef& weight) {
  if (weight.rows() != x.size() || weight.cols() != grad_logits.size()) throw ShapeError("fc backward: shape mismatch");
  return {weight * grad_logits, x * grad_logits.transpose(), grad_logits};
}

LossResult softmax_cross_entropy(const Vector& logits, int label) {
  if (label < 0 || label >= logits.size())
    throw DomainError("label " + std::to_string(label) + " out of range for " + std::to_string(logits.size()) +
                      " classes");
  if (!logits.allFinite()) throw NumericError("non-finite logits");
  const double peak = logits.maxCoeff();
  Vector p = (logits.array() - peak).exp();
  const double z = p.sum();
  p /= z;
  LossResult out;
  out.loss = std::log(z) - (logits[label] - peak);
  out.grad = p;
  out.grad[label] -= 1.0;
  return out;
}

}  // namespace eeggcn::nn
