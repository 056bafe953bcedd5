#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "eeggcn/coarsen.hpp"
#include "eeggcn/error.hpp"

using namespace eeggcn;
using coarsen::CoarseningHierarchy;
using graph::Edge;
using graph::WeightedGraph;

namespace {

// Integer weights keep every sum exact in double.
WeightedGraph random_int_graph(Index n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(p);
  std::uniform_int_distribution<int> weight(1, 9);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (keep(rng)) edges.push_back({i, j, static_cast<double>(weight(rng))});
  return WeightedGraph::from_edges(n, edges);
}

void check_invariants(const CoarseningHierarchy& h) {
  const auto sizes = h.padded_sizes();
  REQUIRE(sizes.size() == h.num_levels() + 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) CHECK(sizes[l] == 2 * sizes[l + 1]);

  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    const auto& g = h.levels[l];
    REQUIRE(g.size() == sizes[l]);
    for (Index s = 0; s < g.size(); ++s)
      if (h.fake[l][static_cast<std::size_t>(s)]) CHECK(g.neighbors(s).empty());
    // same graph, relabelled
    CHECK(g.total_weight() == h.graphs[l].total_weight());
    CHECK(g.edge_count() == h.graphs[l].edge_count());
  }

  for (std::size_t l = 0; l < h.num_levels(); ++l)
    CHECK(h.graphs[l + 1].total_weight() == h.graphs[l].total_weight() - h.matched_weight[l]);

  std::vector<Index> sorted = h.perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == static_cast<Index>(i));
  const auto inv = coarsen::inverse_permutation(h.perm);
  for (std::size_t s = 0; s < h.perm.size(); ++s)
    CHECK(inv[static_cast<std::size_t>(h.perm[s])] == static_cast<Index>(s));
}

}  // namespace

TEST_CASE("two connected vertices merge without padding") {
  const Edge e{0, 1, 1.0};
  const auto h = coarsen::graclus_coarsen(WeightedGraph::from_edges(2, {&e, 1}), 1, 3);
  REQUIRE(h.num_levels() == 1);
  CHECK(h.graphs[1].size() == 1);
  CHECK(h.graphs[1].edge_count() == 0);
  CHECK(h.padded_size(0) == 2);
  CHECK(std::none_of(h.fake[0].begin(), h.fake[0].end(), [](bool f) { return f; }));
  CHECK(h.matched_weight[0] == 1.0);
  CHECK(h.perm.size() == 2);
}

TEST_CASE("isolated vertex gets one fake sibling") {
  const auto h = coarsen::graclus_coarsen(WeightedGraph(1), 1, 3);
  CHECK(h.graphs[1].size() == 1);
  CHECK(h.padded_size(0) == 2);
  CHECK(h.perm == std::vector<Index>{0, 1});
  CHECK_FALSE(h.fake[0][0]);
  CHECK(h.fake[0][1]);
}

TEST_CASE("complete graph on four vertices pairs up") {
  std::vector<Edge> edges;
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) edges.push_back({i, j, 1.0});
  const auto g = WeightedGraph::from_edges(4, edges);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = coarsen::graclus_coarsen(g, 1, seed);
    REQUIRE(h.graphs[1].size() == 2);
    // four cross edges collapse onto one coarse edge
    CHECK(h.graphs[1].weight(0, 1) == 4.0);
    CHECK(h.matched_weight[0] == 2.0);
    CHECK(h.padded_size(0) == 4);
  }
}

TEST_CASE("coarsen_until_edgeless ends on an edgeless graph") {
  const auto g = random_int_graph(40, 0.3, 11);
  const auto h = coarsen::coarsen_until_edgeless(g, 2, 5);
  CHECK(h.num_levels() >= 2);
  CHECK(h.graphs.back().edge_count() == 0);
  check_invariants(h);

  const auto empty = coarsen::coarsen_until_edgeless(WeightedGraph(3), 2, 5);
  CHECK(empty.num_levels() == 2);
}

TEST_CASE("invalid coarsening requests") {
  CHECK_THROWS_AS(coarsen::graclus_coarsen(WeightedGraph(4), 0, 1), ConfigError);
  CHECK_THROWS_AS(coarsen::graclus_coarsen(WeightedGraph(), 1, 1), ConfigError);
}

TEST_CASE("perm replays the parent maps") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_int_graph(8 + static_cast<Index>(seed), 0.4, seed);
    const auto h = coarsen::graclus_coarsen(g, 2, seed + 100);
    for (std::size_t l = 0; l < h.num_levels(); ++l) {
      const auto& fine = h.orderings[l];
      const auto& coarse = h.orderings[l + 1];
      const Index real_fine = h.real_size(l);
      const Index real_coarse = h.real_size(l + 1);
      REQUIRE(fine.size() == 2 * coarse.size());
      for (std::size_t s = 0; s < coarse.size(); ++s) {
        const Index a = fine[2 * s], b = fine[2 * s + 1];
        if (coarse[s] >= real_coarse) {
          CHECK(a >= real_fine);
          CHECK(b >= real_fine);
          continue;
        }
        REQUIRE(a < real_fine);
        CHECK(h.parents[l][static_cast<std::size_t>(a)] == coarse[s]);
        if (b < real_fine) CHECK(h.parents[l][static_cast<std::size_t>(b)] == coarse[s]);
      }
    }
    check_invariants(h);
  }
}

TEST_CASE("malformed parent maps are rejected") {
  CoarseningHierarchy h;
  h.graphs = {WeightedGraph(3), WeightedGraph(1)};
  h.parents = {{0, 0, 0}};
  CHECK_THROWS_AS(coarsen::build_perm(h), ValidationError);
  h.parents = {{0, 1, 0}};
  CHECK_THROWS_AS(coarsen::build_perm(h), ValidationError);
  h.parents = {{0, 0}};
  CHECK_THROWS_AS(coarsen::build_perm(h), ValidationError);
  h.parents.clear();
  CHECK_THROWS_AS(coarsen::build_perm(h), ValidationError);
}

TEST_CASE("perm_data scatters rows and zero-fills fakes") {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  CHECK(coarsen::perm_data(x, {0, 1}, 2) == x);

  Matrix one(1, 1);
  one << 7;
  const Matrix a = coarsen::perm_data(one, {0, 1}, 2);
  CHECK(a(0, 0) == 7.0);
  CHECK(a(1, 0) == 0.0);
  const Matrix b = coarsen::perm_data(one, {1, 0}, 2);
  CHECK(b(0, 0) == 0.0);
  CHECK(b(1, 0) == 7.0);

  Matrix y(3, 1);
  y << 1, 2, 3;
  const Matrix z = coarsen::perm_data(y, {2, 3, 0, 1}, 4);
  CHECK(z.sum() == y.sum());
  CHECK(z(0, 0) == 3.0);
  CHECK(z(1, 0) == 0.0);

  CHECK_THROWS_AS(coarsen::perm_data(y, {0, 1}, 4), ShapeError);
  CHECK_THROWS_AS(coarsen::perm_data(y, {0, 1}, 2), ShapeError);
}

TEST_CASE("inverse_permutation rejects non-permutations") {
  CHECK(coarsen::inverse_permutation({2, 0, 1}) == std::vector<Index>{1, 2, 0});
  CHECK_THROWS_AS(coarsen::inverse_permutation({0, 0}), ValidationError);
  CHECK_THROWS_AS(coarsen::inverse_permutation({0, 2}), ValidationError);
}

TEST_CASE("hierarchy is deterministic in the seed") {
  const auto g = random_int_graph(30, 0.5, 2);
  const auto a = coarsen::graclus_coarsen(g, 3, 9);
  const auto b = coarsen::graclus_coarsen(g, 3, 9);
  CHECK(a.parents == b.parents);
  CHECK(a.perm == b.perm);
  for (std::size_t l = 0; l < a.levels.size(); ++l) CHECK(a.levels[l] == b.levels[l]);
}

TEST_CASE("random hierarchies keep their invariants") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const Index n = std::uniform_int_distribution<Index>(1, 60)(rng);
    const double p = std::uniform_real_distribution<double>(0.05, 0.9)(rng);
    const int levels = std::uniform_int_distribution<int>(1, 4)(rng);
    check_invariants(coarsen::graclus_coarsen(random_int_graph(n, p, seed), levels, seed));
  }
}
