#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "eeggcn/electrodes.hpp"
#include "eeggcn/error.hpp"
#include "eeggcn/graph.hpp"

using namespace eeggcn;
using namespace eeggcn::graph;

namespace {

WeightedGraph random_weighted(Index n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (u(rng) < p) edges.push_back({i, j, 0.05 + u(rng)});
  return WeightedGraph::from_edges(n, edges);
}

Vector dense_eigenvalues(const SparseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Union rule, written out directly on the dense matrix.
Matrix topk_oracle(const Matrix& w, int k) {
  const Index n = w.rows();
  Matrix keep = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> nb;
    for (Index j = 0; j < n; ++j)
      if (w(i, j) > 0) nb.push_back(j);
    std::sort(nb.begin(), nb.end(), [&](Index a, Index b) { return w(i, a) != w(i, b) ? w(i, a) > w(i, b) : a < b; });
    for (std::size_t r = 0; r < nb.size() && r < static_cast<std::size_t>(k); ++r) {
      keep(i, nb[r]) = w(i, nb[r]);
      keep(nb[r], i) = w(i, nb[r]);
    }
  }
  return keep;
}

void check_graph_invariants(const WeightedGraph& g) {
  const Matrix w = g.dense();
  CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.minCoeff() >= 0.0);
}

}  // namespace

TEST_CASE("WeightedGraph construction and validation") {
  std::vector<Edge> e{{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 2.0}, {2, 3, 0.0}};
  const auto g = WeightedGraph::from_edges(4, e);
  CHECK(g.weight(0, 1) == 1.5);
  CHECK(g.weight(1, 0) == 1.5);
  CHECK(g.edge_count() == 2);
  CHECK(g.total_weight() == 3.5);
  CHECK(g.degrees()[1] == 3.5);
  check_graph_invariants(g);
  std::vector<Edge> self{{1, 1, 1.0}};
  CHECK_THROWS_AS(WeightedGraph::from_edges(3, self), ValidationError);
  std::vector<Edge> neg{{0, 1, -1.0}};
  CHECK_THROWS_AS(WeightedGraph::from_edges(3, neg), ValidationError);
  std::vector<Edge> out{{0, 5, 1.0}};
  CHECK_THROWS_AS(WeightedGraph::from_edges(3, out), ValidationError);
}

TEST_CASE("corr_graph examples") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  RowMatrix trial(3, 2000);
  for (Index t = 0; t < trial.cols(); ++t) {
    trial(0, t) = nd(rng);
    trial(1, t) = trial(0, t);
    trial(2, t) = -trial(0, t);
  }
  std::vector<RowMatrix> trials{trial};
  auto g = corr_graph(trials);
  CHECK(g.weight(0, 1) == doctest::Approx(1.0));
  CHECK(g.weight(0, 2) == doctest::Approx(1.0));

  // Independent channels: small weight, averaged over seeds.
  double mean = 0.0;
  for (int s = 0; s < 20; ++s) {
    std::mt19937_64 r(100 + s);
    RowMatrix t(2, 4000);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = nd(r);
    std::vector<RowMatrix> one{t};
    const double w = corr_graph(one).weight(0, 1);
    CHECK(w < 0.2);
    mean += w / 20;
  }
  CHECK(mean < 0.05);
}

TEST_CASE("corr_graph: mean |r| over trials matches an independent Pearson") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  std::vector<RowMatrix> trials;
  for (int t = 0; t < 3; ++t) {
    RowMatrix m(4, 50);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    m.row(3) = 0.5 * m.row(0) + 0.2 * m.row(3);
    trials.push_back(m);
  }
  const auto g = corr_graph(trials);
  const auto pearson = [](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    const double ma = a.mean(), mb = b.mean();
    double sab = 0, saa = 0, sbb = 0;
    for (Index i = 0; i < a.size(); ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
  };
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) {
      double expect = 0;
      for (const auto& t : trials) expect += std::abs(pearson(t.row(i), t.row(j))) / 3.0;
      CHECK(g.weight(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("corr_graph: degenerate channel") {
  RowMatrix t = RowMatrix::Zero(3, 10);
  for (Index i = 0; i < 10; ++i) {
    t(0, i) = i;
    t(2, i) = i * i;
  }
  std::vector<RowMatrix> trials{t, t};
  try {
    corr_graph(trials);
    FAIL("expected DegenerateChannelError");
  } catch (const DegenerateChannelError& e) {
    CHECK(e.channel() == 1);
  }
}

TEST_CASE("dist_graph") {
  ElectrodeLayout layout;
  layout.names = {"a", "b", "c"};
  layout.positions = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double d = std::sqrt(2.0);
  auto g = dist_graph(layout, d);
  CHECK(g.weight(0, 1) == doctest::Approx(std::exp(-1.0)));
  g = dist_graph(layout, d / 2);
  CHECK(g.weight(1, 2) == doctest::Approx(std::exp(-4.0)));
  CHECK(g.weight(0, 0) == 0.0);
  CHECK_THROWS_AS(dist_graph(layout, 0.0), ConfigError);
  layout.positions[2] = layout.positions[1];
  CHECK_THROWS_AS(dist_graph(layout, 1.0), ValidationError);

  const auto& std_layout = standard_layout();
  CHECK(std_layout.size() == 32);
  CHECK_NOTHROW(validate_layout(std_layout));
  const auto full = dist_graph(std_layout, mean_pairwise_distance(std_layout));
  CHECK(full.edge_count() == 496);
  check_graph_invariants(full);
}

TEST_CASE("rand_graph") {
  CHECK(rand_graph(32, 0.0, 1).edge_count() == 0);
  CHECK(rand_graph(32, 1.0, 1).edge_count() == 496);
  CHECK(rand_graph(32, 0.4, 7) == rand_graph(32, 0.4, 7));
  for (const auto& e : rand_graph(20, 0.5, 3).edges()) CHECK(e.w == 1.0);
  // Binomial(496, 0.5) per graph; the mean of 200 has sd sqrt(124 / 200).
  double total = 0;
  for (std::uint64_t s = 0; s < 200; ++s) total += static_cast<double>(rand_graph(32, 0.5, s).edge_count());
  CHECK(std::abs(total / 200 - 248.0) <= 3 * std::sqrt(124.0 / 200.0));
}

TEST_CASE("sparsify_topk") {
  // K4 with w01 > w02 > w03 > w12 > w13 > w23.
  std::vector<Edge> k4{{0, 1, 6}, {0, 2, 5}, {0, 3, 4}, {1, 2, 3}, {1, 3, 2}, {2, 3, 1}};
  const auto g = WeightedGraph::from_edges(4, k4);
  const auto s = sparsify_topk(g, 1);
  std::set<std::pair<Index, Index>> kept;
  for (const auto& e : s.edges()) kept.insert({e.i, e.j});
  CHECK(kept == std::set<std::pair<Index, Index>>{{0, 1}, {0, 2}, {0, 3}});
  CHECK(Matrix(s.dense()) == topk_oracle(g.dense(), 1));

  CHECK(sparsify_topk(g, 3) == g);
  std::vector<Edge> star{{0, 1, 1}, {0, 2, 2}, {0, 3, 3}, {0, 4, 4}};
  const auto sg = WeightedGraph::from_edges(5, star);
  CHECK(sparsify_topk(sg, 1) == sg);

  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto r = random_weighted(12, 0.6, seed);
    for (int k : {1, 2, 4}) {
      const auto t = sparsify_topk(r, k);
      CHECK(t.dense() == topk_oracle(r.dense(), k));
      check_graph_invariants(t);
      const Matrix before = r.dense(), after = t.dense();
      for (Index v = 0; v < 12; ++v) {
        const auto deg_before = (before.row(v).array() > 0).count();
        const auto deg_after = (after.row(v).array() > 0).count();
        CHECK(deg_after <= deg_before);
        if (deg_before > 0) CHECK(deg_after >= 1);
      }
    }
  }
  // Ties go to the smaller neighbour index.
  std::vector<Edge> tie{{0, 1, 1}, {0, 2, 1}, {0, 3, 1}};
  const auto tg = sparsify_topk(WeightedGraph::from_edges(4, tie), 1);
  CHECK(tg.edge_count() == 3);  // each leaf keeps its only edge
  CHECK_THROWS_AS(sparsify_topk(g, 0), ConfigError);
}

TEST_CASE("merge_bands") {
  std::vector<WeightedGraph> bands;
  std::size_t intra = 0;
  for (int b = 0; b < 8; ++b) {
    bands.push_back(sparsify_topk(random_weighted(32, 0.3, 50 + b), 4));
    intra += bands.back().edge_count();
  }
  const auto off = merge_bands(bands, false);
  CHECK(off.size() == 256);
  CHECK(off.edge_count() == intra);
  CHECK(connected_components(off) >= 8);
  const Matrix w = off.dense();
  for (Index i = 0; i < 256; ++i)
    for (Index j = 0; j < 256; ++j)
      if (i / 32 != j / 32) CHECK(w(i, j) == 0.0);
  for (int b = 0; b < 8; ++b) CHECK(w.block(32 * b, 32 * b, 32, 32) == bands[b].dense());

  const auto on = merge_bands(bands, true);
  CHECK(on.edge_count() == intra + 896);
  for (Index e = 0; e < 32; ++e)
    for (int b1 = 0; b1 < 8; ++b1)
      for (int b2 = b1 + 1; b2 < 8; ++b2) CHECK(on.weight(b1 * 32 + e, b2 * 32 + e) == 1.0);

  std::vector<WeightedGraph> empty(8, WeightedGraph(32));
  const auto k8s = merge_bands(empty, true);
  CHECK(k8s.size() == 256);
  CHECK(k8s.edge_count() == 896);
  CHECK(connected_components(k8s) == 32);

  std::vector<WeightedGraph> mixed{WeightedGraph(32), WeightedGraph(31)};
  CHECK_THROWS_AS(merge_bands(mixed, true), ConfigError);
}

TEST_CASE("normalized_laplacian examples") {
  std::vector<Edge> one{{0, 1, 1}};
  auto lap = normalized_laplacian(WeightedGraph::from_edges(2, one));
  Matrix expect(2, 2);
  expect << 1, -1, -1, 1;
  CHECK((Matrix(lap.matrix) - expect).norm() < 1e-15);
  CHECK(lap.lambda_max == doctest::Approx(2.0).epsilon(1e-6));

  std::vector<Edge> tri{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  lap = normalized_laplacian(WeightedGraph::from_edges(3, tri));
  const Vector ev = dense_eigenvalues(lap.matrix);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(1.5));
  CHECK(ev[2] == doctest::Approx(1.5));
  CHECK(std::abs(lap.lambda_max - 1.5) <= 1e-5);

  // Isolated vertices keep a unit diagonal.
  std::vector<Edge> partial{{0, 1, 2.0}};
  lap = normalized_laplacian(WeightedGraph::from_edges(3, partial));
  CHECK(lap.matrix.coeff(2, 2) == 1.0);
  CHECK(lap.matrix.coeff(2, 0) == 0.0);
}

TEST_CASE("normalized_laplacian: entrywise formula and spectrum") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_weighted(10, 0.4, seed);
    const auto lap = normalized_laplacian(g);
    const Matrix w = g.dense();
    const Vector d = w.rowwise().sum();
    const Matrix l = lap.matrix;
    for (Index i = 0; i < 10; ++i)
      for (Index j = 0; j < 10; ++j) {
        double expect = (i == j) ? 1.0 : 0.0;
        if (d[i] > 0 && d[j] > 0) expect -= w(i, j) / std::sqrt(d[i] * d[j]);
        CHECK(l(i, j) == doctest::Approx(expect).epsilon(1e-14));
      }
    const Vector ev = dense_eigenvalues(lap.matrix);
    CHECK(ev.minCoeff() >= -1e-12);
    CHECK(ev.maxCoeff() <= 2.0 + 1e-9);
    if (g.edge_count() > 0) CHECK(std::abs(lap.lambda_max - ev.maxCoeff()) <= 1e-5 * ev.maxCoeff());
  }
}

TEST_CASE("lambda_max fallback and scaling") {
  SparseMatrix zero(3, 3);
  const auto r = lambda_max(zero);
  CHECK(r.value == kLambdaMaxFallback);
  const auto lap_edgeless = normalized_laplacian(WeightedGraph(3));
  CHECK(lap_edgeless.lambda_max == 2.0);

  std::vector<Edge> one{{0, 1, 1}};
  auto lap = normalized_laplacian(WeightedGraph::from_edges(2, one));
  lap.lambda_max = 2.0;
  Matrix expect(2, 2);
  expect << 0, -1, -1, 0;
  CHECK((Matrix(scale_laplacian(lap)) - expect).norm() < 1e-15);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto lp = normalized_laplacian(random_weighted(12, 0.3, seed));
    const Vector ev = dense_eigenvalues(scale_laplacian(lp));
    CHECK(ev.cwiseAbs().maxCoeff() <= 1.0 + 1e-6);
  }
}

TEST_CASE("cheb_basis examples") {
  SparseMatrix ls(2, 2);
  ls.insert(0, 1) = -1;
  ls.insert(1, 0) = -1;
  Matrix x(2, 1);
  x << 1, 0;
  auto b = cheb_basis(ls, x, 1);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == x);
  b = cheb_basis(ls, x, 3);
  REQUIRE(b.size() == 3);
  CHECK(b[1](0, 0) == 0.0);
  CHECK(b[1](1, 0) == -1.0);
  CHECK(b[2](0, 0) == 1.0);
  CHECK(b[2](1, 0) == 0.0);
  CHECK_THROWS_AS(cheb_basis(ls, Matrix::Zero(3, 1), 2), ShapeError);
  CHECK_THROWS_AS(cheb_basis(ls, x, 0), ConfigError);
}

TEST_CASE("spectral oracle: identity, T1 and equivalence") {
  const auto g = random_weighted(8, 0.5, 21);
  const auto lap = normalized_laplacian(g);
  const auto ls = scale_laplacian(lap);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Vector x(8);
  for (auto& v : x) v = nd(rng);

  std::vector<double> t0{1, 0, 0};
  CHECK((spectral_filter_oracle(lap, t0, x) - x).norm() <= 1e-12 * x.norm());
  std::vector<double> t1{0, 1};
  const Vector lsx = ls * x;
  CHECK((spectral_filter_oracle(lap, t1, x) - lsx).norm() <= 1e-12 * lsx.norm());

  std::vector<double> theta(5);
  for (auto& t : theta) t = nd(rng);
  const auto basis = cheb_basis(ls, Matrix(x), 5);
  Vector sum = Vector::Zero(8);
  for (int m = 0; m < 5; ++m) sum += theta[m] * basis[m].col(0);
  const Vector oracle = spectral_filter_oracle(lap, theta, x);
  CHECK((sum - oracle).norm() <= 1e-10 * oracle.norm());
  CHECK((chebyshev_filter(ls, theta, x) - oracle).norm() <= 1e-10 * oracle.norm());

  const auto sd = spectral_decomposition(lap);
  const Matrix& u = sd.eigenvectors;
  CHECK((u.transpose() * u - Matrix::Identity(8, 8)).norm() <= 1e-9);
  CHECK((u * sd.eigenvalues.asDiagonal() * u.transpose() - Matrix(lap.matrix)).norm() <= 1e-9);

  const auto big = normalized_laplacian(rand_graph(65, 0.1, 1));
  CHECK_THROWS_AS(spectral_filter_oracle(big, theta, Vector::Zero(65)), OracleScopeError);
}

TEST_CASE("graph export round trip") {
  const auto g = random_weighted(10, 0.5, 4);
  std::stringstream ss;
  write_graph(ss, g);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "10 " + std::to_string(g.edge_count()));
  ss.seekg(0);
  const auto back = read_graph(ss);
  CHECK(back.edge_count() == g.edge_count());
  CHECK((back.dense() - g.dense()).cwiseAbs().maxCoeff() <= 1e-8);
}
