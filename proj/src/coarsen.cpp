#include "eeggcn/coarsen.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "eeggcn/error.hpp"

namespace eeggcn::coarsen {
namespace {

struct LevelResult {
  std::vector<Index> parent;
  graph::WeightedGraph coarse;
  double matched_weight = 0.0;
};

LevelResult coarsen_one_level(const graph::WeightedGraph& g, std::mt19937_64& rng) {
  const Index n = g.size();
  const Vector degree = g.degrees();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  LevelResult out;
  out.parent.assign(static_cast<std::size_t>(n), -1);
  Index clusters = 0;
  for (Index v : order) {
    if (out.parent[v] >= 0) continue;
    Index best = -1;
    double best_score = 0.0;
    // neighbours come in ascending index order, so ties keep the smaller one
    for (SparseMatrix::InnerIterator it(g.weights(), v); it; ++it) {
      const Index u = it.col();
      if (out.parent[u] >= 0) continue;
      const double score = it.value() * (1.0 / degree[v] + 1.0 / degree[u]);
      if (best < 0 || score > best_score) {
        best = u;
        best_score = score;
      }
    }
    out.parent[v] = clusters;
    if (best >= 0) {
      out.parent[best] = clusters;
      out.matched_weight += g.weight(v, best);
    }
    ++clusters;
  }

  std::vector<graph::Edge> edges;
  for (const auto& e : g.edges()) {
    const Index a = out.parent[e.i], b = out.parent[e.j];
    if (a != b) edges.push_back({a, b, e.w});
  }
  out.coarse = graph::WeightedGraph::from_edges(clusters, edges);
  return out;
}

void finalize(CoarseningHierarchy& h) {
  h.orderings = build_perm(h);
  h.levels.clear();
  h.fake.clear();
  for (std::size_t l = 0; l < h.orderings.size(); ++l) {
    const auto& ordering = h.orderings[l];
    const Index real = h.graphs[l].size();
    std::vector<Index> slot_of(static_cast<std::size_t>(real), -1);
    std::vector<bool> fake(ordering.size());
    for (std::size_t s = 0; s < ordering.size(); ++s) {
      fake[s] = ordering[s] >= real;
      if (!fake[s]) slot_of[static_cast<std::size_t>(ordering[s])] = static_cast<Index>(s);
    }
    std::vector<graph::Edge> edges;
    for (const auto& e : h.graphs[l].edges()) edges.push_back({slot_of[e.i], slot_of[e.j], e.w});
    h.levels.push_back(graph::WeightedGraph::from_edges(static_cast<Index>(ordering.size()), edges));
    h.fake.push_back(std::move(fake));
  }
  h.perm = h.orderings.front();
}

}  // namespace

std::vector<Index> CoarseningHierarchy::padded_sizes() const {
  std::vector<Index> sizes;
  for (const auto& o : orderings) sizes.push_back(static_cast<Index>(o.size()));
  return sizes;
}

CoarseningHierarchy graclus_coarsen(const graph::WeightedGraph& g, int num_levels, std::uint64_t seed) {
  if (num_levels < 1) throw ConfigError("coarsening needs at least one level");
  if (g.size() < 1) throw ConfigError("cannot coarsen an empty graph");
  std::mt19937_64 rng(seed);
  CoarseningHierarchy h;
  h.graphs.push_back(g);
  for (int l = 0; l < num_levels; ++l) {
    auto level = coarsen_one_level(h.graphs.back(), rng);
    h.parents.push_back(std::move(level.parent));
    h.matched_weight.push_back(level.matched_weight);
    h.graphs.push_back(std::move(level.coarse));
  }
  finalize(h);
  return h;
}

CoarseningHierarchy coarsen_until_edgeless(const graph::WeightedGraph& g, int min_levels,
                                           std::uint64_t seed) {
  if (g.size() < 1) throw ConfigError("cannot coarsen an empty graph");
  std::mt19937_64 rng(seed);
  CoarseningHierarchy h;
  h.graphs.push_back(g);
  while (static_cast<int>(h.parents.size()) < min_levels || h.graphs.back().edge_count() > 0) {
    auto level = coarsen_one_level(h.graphs.back(), rng);
    h.parents.push_back(std::move(level.parent));
    h.matched_weight.push_back(level.matched_weight);
    h.graphs.push_back(std::move(level.coarse));
  }
  finalize(h);
  return h;
}

std::vector<std::vector<Index>> build_perm(const CoarseningHierarchy& h) {
  if (h.graphs.size() != h.parents.size() + 1)
    throw ValidationError("hierarchy needs one more graph than parent maps");
  const std::size_t levels = h.parents.size();
  std::vector<std::vector<Index>> orderings(levels + 1);
  const Index coarsest = h.graphs.back().size();
  orderings[levels].resize(static_cast<std::size_t>(coarsest));
  std::iota(orderings[levels].begin(), orderings[levels].end(), Index{0});

  for (std::size_t l = levels; l-- > 0;) {
    const auto& parent = h.parents[l];
    const Index fine = h.graphs[l].size();
    const Index coarse = h.graphs[l + 1].size();
    if (static_cast<Index>(parent.size()) != fine) throw ValidationError("parent map size mismatch");

    std::vector<std::vector<Index>> children(static_cast<std::size_t>(coarse));
    for (Index v = 0; v < fine; ++v) {
      const Index c = parent[static_cast<std::size_t>(v)];
      if (c < 0 || c >= coarse) throw ValidationError("parent index out of range");
      children[static_cast<std::size_t>(c)].push_back(v);
    }

    Index next_fake = fine;
    auto& out = orderings[l];
    for (Index c : orderings[l + 1]) {
      if (c >= coarse) {
        out.push_back(next_fake++);
        out.push_back(next_fake++);
        continue;
      }
      const auto& kids = children[static_cast<std::size_t>(c)];
      if (kids.empty() || kids.size() > 2)
        throw ValidationError("coarse vertex must have one or two children");
      out.push_back(kids[0]);
      out.push_back(kids.size() == 2 ? kids[1] : next_fake++);
    }
  }
  return orderings;
}

Matrix perm_data(const Matrix& x, const std::vector<Index>& perm, Index padded_n) {
  if (static_cast<Index>(perm.size()) != padded_n)
    throw ShapeError("permutation does not cover the padded vertex count");
  if (x.rows() > padded_n) throw ShapeError("more real vertices than padded slots");
  Matrix out = Matrix::Zero(padded_n, x.cols());
  for (Index s = 0; s < padded_n; ++s) {
    const Index v = perm[static_cast<std::size_t>(s)];
    if (v < 0) throw ShapeError("negative permutation entry");
    if (v < x.rows()) out.row(s) = x.row(v);
  }
  return out;
}

std::vector<Index> inverse_permutation(const std::vector<Index>& perm) {
  std::vector<Index> inv(perm.size(), -1);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    const Index v = perm[s];
    if (v < 0 || v >= static_cast<Index>(perm.size()) || inv[static_cast<std::size_t>(v)] != -1)
      throw ValidationError("not a permutation");
    inv[static_cast<std::size_t>(v)] = static_cast<Index>(s);
  }
  return inv;
}

}  // namespace eeggcn::coarsen
