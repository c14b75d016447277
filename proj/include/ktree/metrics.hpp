#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ktree/fraction.hpp"
#include "ktree/ktree.hpp"

namespace ktree::metrics {

struct NodeMetrics {
  NodeId id;
  std::uint32_t label = 0;
  std::size_t out_degree = 0;
  std::size_t degree = 0;
  Fraction clustering;
  std::uint32_t descendants = 1;
  std::uint32_t dist_to_01 = 0;
  std::uint32_t dist_to_root_clique = 0;
};

struct RootDistances {
  std::vector<std::uint32_t> to_01;           // indexed by NodeId::index
  std::vector<std::uint32_t> to_root_clique;  // indexed by NodeId::index
};

std::size_t out_degree(const KTree& tree, NodeId u);
std::size_t degree(const KTree& tree, NodeId u);

/// Realized edges among N(u) over C(d(u), 2); zero when d(u) <= 1.
Fraction clustering_direct(const KTree& tree, NodeId u);

/// Closed form of the clustering coefficient in a k-tree, valid for d >= k >= 2:
/// 2(k-1)/d - (k-1)(k-2)/(d(d-1)).
Fraction clustering_formula(int k, std::int64_t d);

/// Number of edges among the neighbours of u, counted on the graph.
std::uint64_t neighbor_edges(const KTree& tree, NodeId u);

/// Size of the descendant set of u (u included): w is a descendant iff w == u
/// or some parent of w is a descendant.
std::uint32_t descendants(const KTree& tree, NodeId u);
/// Descendant counts of every node, indexed by NodeId::index. Propagates
/// 64-node ancestor masks in index order, so O(n^2 k / 64).
std::vector<std::uint32_t> descendant_counts(const KTree& tree);

/// Breadth-first distances on the undirected simple graph, from 0_1 and from
/// the whole root clique.
RootDistances distances_from_root(const KTree& tree);

/// All per-node parameters, root nodes first.
std::vector<NodeMetrics> node_metrics(const KTree& tree);

/// CSV with header label,outdeg,deg,clustering_num,clustering_den,descendants,dist01,distK0
void write_metrics_csv(std::ostream& os, const KTree& tree, const std::vector<NodeMetrics>& rows);

}  // namespace ktree::metrics
