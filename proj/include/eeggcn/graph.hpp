#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "eeggcn/electrodes.hpp"
#include "eeggcn/linalg.hpp"

namespace eeggcn::graph {

struct Edge {
  Index i = 0;
  Index j = 0;
  double w = 0.0;
};

// Undirected graph with non-negative weights and no self-loops. The weight
// matrix is stored in full (both triangles).
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(Index n);

  // Duplicate (i, j) pairs are summed. Throws ValidationError on self-loops,
  // negative or non-finite weights, or out-of-range endpoints.
  static WeightedGraph from_edges(Index n, std::span<const Edge> edges);
  static WeightedGraph from_dense(const Matrix& weights);

  Index size() const { return n_; }
  const SparseMatrix& weights() const { return w_; }
  double weight(Index i, Index j) const { return w_.coeff(i, j); }

  std::size_t edge_count() const;
  Vector degrees() const;
  // Edges with i < j, sorted by (i, j).
  std::vector<Edge> edges() const;
  std::vector<Index> neighbors(Index v) const;
  // Sum over unordered pairs.
  double total_weight() const;
  Matrix dense() const { return Matrix(w_); }

 private:
  Index n_ = 0;
  SparseMatrix w_;
};

bool operator==(const WeightedGraph& a, const WeightedGraph& b);

enum class Method { Corr, Dist, Rand };

const char* to_string(Method method);
Method parse_method(std::string_view text);

struct GraphConfig {
  Method method = Method::Dist;
  int k = 4;
  double p = 0.3;
  double sigma = 0.0;  // <= 0 selects the mean pairwise electrode distance
  bool inter_band = true;
  std::uint64_t seed = 1;

  void validate() const;
};

// Running mean of |Pearson correlation| between channels over trials.
class CorrelationAccumulator {
 public:
  explicit CorrelationAccumulator(Index channels);
  void add(const RowMatrix& trial);  // channels x samples
  Index channels() const { return channels_; }
  std::size_t trials() const { return trials_; }
  WeightedGraph graph() const;

 private:
  Index channels_;
  std::size_t trials_ = 0;
  Matrix sum_abs_corr_;
  std::vector<bool> has_variance_;
};

WeightedGraph corr_graph(std::span<const RowMatrix> trials);
WeightedGraph dist_graph(const ElectrodeLayout& layout, double sigma);
WeightedGraph rand_graph(Index n, double p, std::uint64_t seed);
WeightedGraph sparsify_topk(const WeightedGraph& g, int k);
// Vertex index = band * n_e + electrode.
WeightedGraph merge_bands(std::span<const WeightedGraph> bands, bool inter_band);

std::size_t connected_components(const WeightedGraph& g);

struct NormalizedLaplacian {
  SparseMatrix matrix;
  double lambda_max = 2.0;
  Index size() const { return matrix.rows(); }
};

NormalizedLaplacian normalized_laplacian(const WeightedGraph& g);

struct LambdaMaxResult {
  double value = 2.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kLambdaMaxFallback = 2.0;

// Power iteration with residual tolerance 1e-6 relative; falls back to 2.0
// when it does not converge or the matrix has no positive spectrum.
LambdaMaxResult lambda_max(const SparseMatrix& matrix, int max_iterations = 1000);

SparseMatrix scale_laplacian(const NormalizedLaplacian& laplacian);

// Writes T_0 X .. T_{M-1} X into consecutive column blocks of `packed`
// (vertices x (M * features)).
void cheb_basis_packed(const SparseMatrix& scaled, const Matrix& x, int order, Matrix& packed);
std::vector<Matrix> cheb_basis(const SparseMatrix& scaled, const Matrix& x, int order);

// sum_m theta_m T_m(L_s) x using the recurrence.
Vector chebyshev_filter(const SparseMatrix& scaled, std::span<const double> theta, const Vector& x);

struct SpectralDecomposition {
  Matrix eigenvectors;  // columns u_l
  Vector eigenvalues;   // ascending
};

inline constexpr Index kOracleMaxVertices = 64;

SpectralDecomposition spectral_decomposition(const NormalizedLaplacian& laplacian);

// U g(Lambda) U^T x with g a Chebyshev series in the scaled eigenvalues.
// Dense eigendecomposition; limited to kOracleMaxVertices.
Vector spectral_filter_oracle(const NormalizedLaplacian& laplacian, std::span<const double> theta,
                              const Vector& x);

// "n m" header then "i j w" lines with i < j and 9 significant digits.
void write_graph(std::ostream& out, const WeightedGraph& g);
void write_graph(const std::filesystem::path& path, const WeightedGraph& g);
WeightedGraph read_graph(std::istream& in);

}  // namespace eeggcn::graph
