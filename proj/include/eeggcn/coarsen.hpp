#pragma once

#include <cstdint>
#include <vector>

#include "eeggcn/graph.hpp"

namespace eeggcn::coarsen {

// Multilevel Graclus coarsening with fake-vertex padding.
//
// graphs[l] is the l-th coarsened graph on its real vertices, parents[l]
// maps a vertex of graphs[l] to its vertex in graphs[l + 1]. orderings[l]
// lists, per padded slot at level l, the real vertex of graphs[l] placed
// there or an id >= graphs[l].size() for a fake vertex. The children of the
// vertex in slot s at level l + 1 occupy slots 2s and 2s + 1 at level l, so
// pooling is a stride-2 scan. levels[l] is graphs[l] relabelled into slot
// order, and fake[l][s] marks padding.
struct CoarseningHierarchy {
  std::vector<graph::WeightedGraph> graphs;
  std::vector<std::vector<Index>> parents;
  std::vector<double> matched_weight;  // intra-pair weight dropped at each level
  std::vector<std::vector<Index>> orderings;
  std::vector<graph::WeightedGraph> levels;
  std::vector<std::vector<bool>> fake;
  std::vector<Index> perm;

  std::size_t num_levels() const { return parents.size(); }
  Index real_size(std::size_t level) const { return graphs.at(level).size(); }
  Index padded_size(std::size_t level) const { return static_cast<Index>(orderings.at(level).size()); }
  std::vector<Index> padded_sizes() const;
};

// Exactly num_levels rounds of greedy normalized-cut matching.
CoarseningHierarchy graclus_coarsen(const graph::WeightedGraph& g, int num_levels, std::uint64_t seed);

// Keeps coarsening until the coarsest graph has no edges, and for at least
// min_levels rounds.
CoarseningHierarchy coarsen_until_edgeless(const graph::WeightedGraph& g, int min_levels,
                                           std::uint64_t seed);

// Fills orderings/levels/fake/perm from graphs + parents. Throws
// ValidationError for malformed parent maps.
std::vector<std::vector<Index>> build_perm(const CoarseningHierarchy& h);

// Scatters rows of x (real vertices) into padded slot order; fake rows are 0.
Matrix perm_data(const Matrix& x, const std::vector<Index>& perm, Index padded_n);

std::vector<Index> inverse_permutation(const std::vector<Index>& perm);

}  // namespace eeggcn::coarsen
