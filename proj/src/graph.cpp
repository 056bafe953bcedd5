#include "eeggcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "eeggcn/error.hpp"

namespace eeggcn::graph {

WeightedGraph::WeightedGraph(Index n) : n_(n), w_(n, n) {
  if (n < 0) throw ValidationError("negative vertex count");
}

WeightedGraph WeightedGraph::from_edges(Index n, std::span<const Edge> edges) {
  WeightedGraph g(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * edges.size());
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
      throw ValidationError("edge endpoint out of range");
    if (e.i == e.j) throw ValidationError("self-loops are not allowed");
    if (!std::isfinite(e.w) || e.w < 0.0) throw ValidationError("edge weights must be finite and >= 0");
    if (e.w == 0.0) continue;
    triplets.emplace_back(e.i, e.j, e.w);
    triplets.emplace_back(e.j, e.i, e.w);
  }
  g.w_.setFromTriplets(triplets.begin(), triplets.end());
  g.w_.makeCompressed();
  return g;
}

WeightedGraph WeightedGraph::from_dense(const Matrix& weights) {
  if (weights.rows() != weights.cols()) throw ShapeError("weight matrix must be square");
  const Index n = weights.rows();
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0) throw ValidationError("self-loops are not allowed");
    for (Index j = i + 1; j < n; ++j) {
      if (weights(i, j) != weights(j, i)) throw ValidationError("weight matrix must be symmetric");
      if (weights(i, j) != 0.0) edges.push_back({i, j, weights(i, j)});
    }
  }
  return from_edges(n, edges);
}

std::size_t WeightedGraph::edge_count() const { return static_cast<std::size_t>(w_.nonZeros()) / 2; }

Vector WeightedGraph::degrees() const {
  Vector d = Vector::Zero(n_);
  for (Index i = 0; i < n_; ++i) {
    for (SparseMatrix::InnerIterator it(w_, i); it; ++it) d[i] += it.value();
  }
  return d;
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Index i = 0; i < n_; ++i) {
    for (SparseMatrix::InnerIterator it(w_, i); it; ++it) {
      if (it.col() > i) out.push_back({i, it.col(), it.value()});
    }
  }
  return out;
}

std::vector<Index> WeightedGraph::neighbors(Index v) const {
  std::vector<Index> out;
  for (SparseMatrix::InnerIterator it(w_, v); it; ++it) out.push_back(it.col());
  return out;
}

double WeightedGraph::total_weight() const {
  double sum = 0.0;
  for (const auto& e : edges()) sum += e.w;
  return sum;
}

bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
  if (a.size() != b.size() || a.edge_count() != b.edge_count()) return false;
  const auto ea = a.edges(), eb = b.edges();
  for (std::size_t k = 0; k < ea.size(); ++k) {
    if (ea[k].i != eb[k].i || ea[k].j != eb[k].j || ea[k].w != eb[k].w) return false;
  }
  return true;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::Corr: return "corr";
    case Method::Dist: return "dist";
    case Method::Rand: return "rand";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "corr") return Method::Corr;
  if (text == "dist") return Method::Dist;
  if (text == "rand") return Method::Rand;
  throw ConfigError("unknown graph method '" + std::string(text) + "' (expected corr, dist or rand)");
}

void GraphConfig::validate() const {
  if (k < 1) throw ConfigError("graph k must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("graph p must lie in [0, 1]");
  if (!std::isfinite(sigma)) throw ConfigError("graph sigma must be finite");
}

// --- correlation ----------------------------------------------------------

CorrelationAccumulator::CorrelationAccumulator(Index channels)
    : channels_(channels),
      sum_abs_corr_(Matrix::Zero(channels, channels)),
      has_variance_(static_cast<std::size_t>(channels), false) {
  if (channels < 2) throw ConfigError("correlation graph needs at least 2 channels");
}

void CorrelationAccumulator::add(const RowMatrix& trial) {
  if (trial.rows() != channels_) throw ShapeError("trial channel count mismatch");
  if (trial.cols() < 2) throw ShapeError("trial needs at least 2 samples");
  Matrix centred = trial;
  centred.colwise() -= centred.rowwise().mean();
  const Matrix gram = centred * centred.transpose();
  for (Index i = 0; i < channels_; ++i) {
    if (gram(i, i) > 0.0) has_variance_[static_cast<std::size_t>(i)] = true;
  }
  for (Index i = 0; i < channels_; ++i) {
    for (Index j = i + 1; j < channels_; ++j) {
      const double denom = std::sqrt(gram(i, i) * gram(j, j));
      if (!(denom > 0.0)) continue;  // undefined correlation contributes nothing
      const double r = std::min(1.0, std::abs(gram(i, j)) / denom);
      sum_abs_corr_(i, j) += r;
      sum_abs_corr_(j, i) += r;
    }
  }
  ++trials_;
}

WeightedGraph CorrelationAccumulator::graph() const {
  if (trials_ == 0) throw DomainError("correlation graph needs at least one trial");
  for (std::size_t c = 0; c < has_variance_.size(); ++c) {
    if (!has_variance_[c])
      throw DegenerateChannelError(c, "channel " + std::to_string(c) + " has zero variance in every trial");
  }
  std::vector<Edge> edges;
  for (Index i = 0; i < channels_; ++i) {
    for (Index j = i + 1; j < channels_; ++j) {
      const double w = sum_abs_corr_(i, j) / static_cast<double>(trials_);
      if (w > 0.0) edges.push_back({i, j, w});
    }
  }
  return WeightedGraph::from_edges(channels_, edges);
}

WeightedGraph corr_graph(std::span<const RowMatrix> trials) {
  if (trials.empty()) throw DomainError("correlation graph needs at least one trial");
  CorrelationAccumulator acc(trials.front().rows());
  for (const auto& t : trials) acc.add(t);
  return acc.graph();
}

// --- distance / random ----------------------------------------------------

WeightedGraph dist_graph(const ElectrodeLayout& layout, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  validate_layout(layout, 0);
  const auto n = static_cast<Index>(layout.size());
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d = distance(layout.positions[i], layout.positions[j]);
      const double w = std::exp(-(d * d) / (sigma * sigma));
      if (w > 0.0) edges.push_back({i, j, w});
    }
  }
  return WeightedGraph::from_edges(n, edges);
}

WeightedGraph rand_graph(Index n, double p, std::uint64_t seed) {
  if (n < 1) throw ConfigError("random graph needs at least one vertex");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (unit(rng) < p) edges.push_back({i, j, 1.0});
    }
  }
  return WeightedGraph::from_edges(n, edges);
}

WeightedGraph sparsify_topk(const WeightedGraph& g, int k) {
  if (k < 1) throw ConfigError("top-k needs k >= 1");
  const Index n = g.size();
  std::vector<Edge> kept;
  std::vector<std::vector<Index>> chosen(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    std::vector<std::pair<double, Index>> incident;
    for (SparseMatrix::InnerIterator it(g.weights(), v); it; ++it) incident.emplace_back(it.value(), it.col());
    std::sort(incident.begin(), incident.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto take = std::min<std::size_t>(incident.size(), static_cast<std::size_t>(k));
    for (std::size_t t = 0; t < take; ++t) chosen[static_cast<std::size_t>(v)].push_back(incident[t].second);
  }
  auto picks = [&](Index a, Index b) {
    const auto& c = chosen[static_cast<std::size_t>(a)];
    return std::find(c.begin(), c.end(), b) != c.end();
  };
  for (const auto& e : g.edges()) {
    if (picks(e.i, e.j) || picks(e.j, e.i)) kept.push_back(e);
  }
  return WeightedGraph::from_edges(n, kept);
}

WeightedGraph merge_bands(std::span<const WeightedGraph> bands, bool inter_band) {
  if (bands.empty()) throw ConfigError("merge_bands needs at least one band graph");
  const Index ne = bands.front().size();
  for (const auto& b : bands) {
    if (b.size() != ne) throw ConfigError("band graphs have mismatched vertex counts");
  }
  const auto nb = static_cast<Index>(bands.size());
  std::vector<Edge> edges;
  for (Index b = 0; b < nb; ++b) {
    for (const auto& e : bands[static_cast<std::size_t>(b)].edges())
      edges.push_back({b * ne + e.i, b * ne + e.j, e.w});
  }
  if (inter_band) {
    for (Index b1 = 0; b1 < nb; ++b1)
      for (Index b2 = b1 + 1; b2 < nb; ++b2)
        for (Index e = 0; e < ne; ++e) edges.push_back({b1 * ne + e, b2 * ne + e, 1.0});
  }
  return WeightedGraph::from_edges(nb * ne, edges);
}

std::size_t connected_components(const WeightedGraph& g) {
  std::vector<Index> parent(static_cast<std::size_t>(g.size()));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = static_cast<std::size_t>(g.size());
  for (const auto& e : g.edges()) {
    const Index a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return components;
}

// --- Laplacian ------------------------------------------------------------

NormalizedLaplacian normalized_laplacian(const WeightedGraph& g) {
  const Index n = g.size();
  const Vector d = g.degrees();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(g.weights().nonZeros() + n));
  for (Index i = 0; i < n; ++i) {
    // Zero-degree vertices keep a unit diagonal.
    triplets.emplace_back(i, i, 1.0);
    for (SparseMatrix::InnerIterator it(g.weights(), i); it; ++it)
      triplets.emplace_back(i, it.col(), -it.value() / std::sqrt(d[i] * d[it.col()]));
  }
  NormalizedLaplacian out;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix.makeCompressed();
  out.lambda_max = g.edge_count() == 0 ? kLambdaMaxFallback : lambda_max(out.matrix).value;
  return out;
}

LambdaMaxResult lambda_max(const SparseMatrix& matrix, int max_iterations) {
  const Index n = matrix.rows();
  LambdaMaxResult result;
  if (n == 0) return result;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = (i % 2 == 0 ? 1.0 : -1.0) * unit(rng);
  v.normalize();
  Vector w(n);
  for (int it = 1; it <= max_iterations; ++it) {
    w.noalias() = matrix * v;
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    const double mu = v.dot(w);
    const double residual = (w - mu * v).norm();
    result.iterations = it;
    if (mu > 0.0 && residual <= 1e-6 * mu) {
      result.value = mu;
      result.converged = true;
      return result;
    }
    v = w / norm;
  }
  result.value = kLambdaMaxFallback;
  return result;
}

SparseMatrix scale_laplacian(const NormalizedLaplacian& laplacian) {
  const double lmax = laplacian.lambda_max > 0.0 ? laplacian.lambda_max : kLambdaMaxFallback;
  const Index n = laplacian.size();
  SparseMatrix identity(n, n);
  identity.setIdentity();
  SparseMatrix scaled = (2.0 / lmax) * laplacian.matrix - identity;
  scaled.prune(0.0);
  scaled.makeCompressed();
  return scaled;
}

// --- Chebyshev ------------------------------------------------------------

void cheb_basis_packed(const SparseMatrix& scaled, const Matrix& x, int order, Matrix& packed) {
  if (order < 1) throw ConfigError("Chebyshev order must be >= 1");
  if (x.rows() != scaled.rows() || scaled.rows() != scaled.cols())
    throw ShapeError("Chebyshev basis: signal rows do not match the Laplacian size");
  const Index f = x.cols();
  packed.resize(x.rows(), f * order);
  packed.leftCols(f) = x;
  if (order > 1) packed.middleCols(f, f).noalias() = scaled * x;
  for (int m = 2; m < order; ++m) {
    auto next = packed.middleCols(m * f, f);
    next.noalias() = scaled * packed.middleCols((m - 1) * f, f);
    next *= 2.0;
    next -= packed.middleCols((m - 2) * f, f);
  }
}

std::vector<Matrix> cheb_basis(const SparseMatrix& scaled, const Matrix& x, int order) {
  Matrix packed;
  cheb_basis_packed(scaled, x, order, packed);
  std::vector<Matrix> out;
  for (int m = 0; m < order; ++m) out.emplace_back(packed.middleCols(m * x.cols(), x.cols()));
  return out;
}

Vector chebyshev_filter(const SparseMatrix& scaled, std::span<const double> theta, const Vector& x) {
  if (theta.empty()) throw ConfigError("filter needs at least one coefficient");
  if (x.size() != scaled.rows()) throw ShapeError("signal length does not match the Laplacian size");
  Vector prev = x;
  Vector y = theta[0] * prev;
  if (theta.size() == 1) return y;
  Vector cur = scaled * x;
  y += theta[1] * cur;
  for (std::size_t m = 2; m < theta.size(); ++m) {
    Vector next = 2.0 * (scaled * cur) - prev;
    y += theta[m] * next;
    prev.swap(cur);
    cur.swap(next);
  }
  return y;
}

SpectralDecomposition spectral_decomposition(const NormalizedLaplacian& laplacian) {
  if (laplacian.size() > kOracleMaxVertices)
    throw OracleScopeError("dense eigendecomposition oracle is limited to " +
                           std::to_string(kOracleMaxVertices) + " vertices");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Matrix(laplacian.matrix));
  if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

Vector spectral_filter_oracle(const NormalizedLaplacian& laplacian, std::span<const double> theta,
                              const Vector& x) {
  if (theta.empty()) throw ConfigError("filter needs at least one coefficient");
  if (x.size() != laplacian.size()) throw ShapeError("signal length does not match the Laplacian size");
  const auto spec = spectral_decomposition(laplacian);
  const double lmax = laplacian.lambda_max > 0.0 ? laplacian.lambda_max : kLambdaMaxFallback;
  Vector response(spec.eigenvalues.size());
  for (Index l = 0; l < response.size(); ++l) {
    const double t = 2.0 * spec.eigenvalues[l] / lmax - 1.0;
    double t_prev = 1.0, t_cur = t;
    double g = theta[0] * t_prev;
    if (theta.size() > 1) g += theta[1] * t_cur;
    for (std::size_t m = 2; m < theta.size(); ++m) {
      const double t_next = 2.0 * t * t_cur - t_prev;
      g += theta[m] * t_next;
      t_prev = t_cur;
      t_cur = t_next;
    }
    response[l] = g;
  }
  const Vector spectrum = spec.eigenvectors.transpose() * x;
  return spec.eigenvectors * response.cwiseProduct(spectrum);
}

// --- text export ----------------------------------------------------------

void write_graph(std::ostream& out, const WeightedGraph& g) {
  const auto edges = g.edges();
  out << g.size() << ' ' << edges.size() << '\n';
  char buf[64];
  for (const auto& e : edges) {
    std::snprintf(buf, sizeof buf, "%.9g", e.w);
    out << e.i << ' ' << e.j << ' ' << buf << '\n';
  }
}

void write_graph(const std::filesystem::path& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph to " + path.string());
  write_graph(out, g);
}

WeightedGraph read_graph(std::istream& in) {
  Index n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw LoadError("graph file: missing 'n m' header");
  std::vector<Edge> edges(m);
  for (auto& e : edges) {
    if (!(in >> e.i >> e.j >> e.w)) throw LoadError("graph file: truncated edge list");
  }
  return WeightedGraph::from_edges(n, edges);
}

}  // namespace eeggcn::graph
