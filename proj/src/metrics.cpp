#include "ktree/metrics.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <ostream>

#include "ktree/error.hpp"

namespace ktree::metrics {

namespace {

using Adjacency = std::vector<std::vector<NodeId>>;

Adjacency build_adjacency(const KTree& tree) {
  Adjacency adj(tree.nodes().size());
  for (const auto& rec : tree.nodes()) adj[rec.id.index] = tree.neighbors(rec.id);
  return adj;
}

std::uint64_t count_neighbor_edges(const Adjacency& adj, NodeId u, std::vector<std::uint32_t>& stamp,
                                   std::uint32_t mark) {
  for (NodeId x : adj[u.index]) stamp[x.index] = mark;
  std::uint64_t twice = 0;
  for (NodeId x : adj[u.index])
    for (NodeId y : adj[x.index]) twice += stamp[y.index] == mark;
  return twice / 2;
}

Fraction clustering_from_edges(std::uint64_t edges, std::size_t d) {
  if (d <= 1) return Fraction{0};
  const auto pairs = static_cast<std::int64_t>(d) * static_cast<std::int64_t>(d - 1) / 2;
  return Fraction{static_cast<std::int64_t>(edges), pairs};
}

void require_node(const KTree& tree, NodeId u) {
  if (!tree.contains(u)) throw Error(ErrorCode::unknown_label, "node index " + std::to_string(u.index));
}

std::vector<std::uint32_t> bfs(const KTree& tree, const Adjacency& adj, std::span<const NodeId> sources) {
  constexpr auto unreached = ~std::uint32_t{0};
  std::vector<std::uint32_t> dist(tree.nodes().size(), unreached);
  std::deque<NodeId> queue;
  for (NodeId s : sources) {
    dist[s.index] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    for (NodeId y : adj[x.index]) {
      if (dist[y.index] == unreached) {
        dist[y.index] = dist[x.index] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

RootDistances distances_with(const KTree& tree, const Adjacency& adj) {
  std::vector<NodeId> roots;
  for (int r = 1; r <= tree.k(); ++r) roots.push_back(tree.root(r));
  RootDistances out;
  out.to_01 = bfs(tree, adj, std::span<const NodeId>(roots).first(1));
  out.to_root_clique = bfs(tree, adj, roots);
  return out;
}

}  // namespace

std::size_t out_degree(const KTree& tree, NodeId u) {
  require_node(tree, u);
  return tree.out_degree(u);
}

std::size_t degree(const KTree& tree, NodeId u) {
  require_node(tree, u);
  return tree.degree(u);
}

std::uint64_t neighbor_edges(const KTree& tree, NodeId u) {
  require_node(tree, u);
  const auto nbrs = tree.neighbors(u);
  std::vector<bool> in_nbhd(tree.nodes().size(), false);
  for (NodeId x : nbrs) in_nbhd[x.index] = true;
  std::uint64_t twice = 0;
  for (NodeId x : nbrs)
    for (NodeId y : tree.neighbors(x)) twice += in_nbhd[y.index];
  return twice / 2;
}

Fraction clustering_direct(const KTree& tree, NodeId u) {
  return clustering_from_edges(neighbor_edges(tree, u), tree.degree(u));
}

Fraction clustering_formula(int k, std::int64_t d) {
  if (k < 2) throw Error(ErrorCode::domain_error, "clustering formula needs k >= 2");
  if (d < k) throw Error(ErrorCode::domain_error, "clustering formula needs d >= k");
  const std::int64_t km1 = k - 1;
  // 2(k-1)/d - (k-1)(k-2)/(d(d-1)) over the common denominator d(d-1).
  return Fraction{2 * km1 * (d - 1) - km1 * (k - 2), d * (d - 1)};
}

std::uint32_t descendants(const KTree& tree, NodeId u) {
  require_node(tree, u);
  std::vector<bool> marked(tree.nodes().size(), false);
  marked[u.index] = true;
  std::uint32_t count = 1;
  const std::uint32_t first = tree.is_root(u) ? 1 : tree.node(u).label + 1;
  for (std::uint32_t j = first; j <= tree.size(); ++j) {
    const NodeId w = tree.inserted(j);
    for (NodeId p : tree.parents(w)) {
      if (marked[p.index]) {
        marked[w.index] = true;
        ++count;
        break;
      }
    }
  }
  return count;
}

std::vector<std::uint32_t> descendant_counts(const KTree& tree) {
  const std::size_t total = tree.nodes().size();
  std::vector<std::uint32_t> out(total, 0);
  std::vector<std::uint64_t> mask(total);
  for (std::size_t base = 0; base < total; base += 64) {
    const std::size_t width = std::min<std::size_t>(64, total - base);
    // Nothing before base can descend from the block.
    for (std::size_t w = base; w < total; ++w) {
      std::uint64_t m = w < base + width ? std::uint64_t{1} << (w - base) : 0;
      for (NodeId p : tree.parents(NodeId{static_cast<std::uint32_t>(w)}))
        if (p.index >= base) m |= mask[p.index];
      mask[w] = m;
      while (m) {
        ++out[base + static_cast<std::size_t>(std::countr_zero(m))];
        m &= m - 1;
      }
    }
  }
  return out;
}

RootDistances distances_from_root(const KTree& tree) { return distances_with(tree, build_adjacency(tree)); }

std::vector<NodeMetrics> node_metrics(const KTree& tree) {
  const auto adj = build_adjacency(tree);
  const auto dist = distances_with(tree, adj);
  std::vector<std::uint32_t> stamp(tree.nodes().size(), 0);
  std::vector<NodeMetrics> rows;
  rows.reserve(tree.nodes().size());
  const auto desc = descendant_counts(tree);
  std::uint32_t mark = 0;
  for (const auto& rec : tree.nodes()) {
    NodeMetrics m;
    m.id = rec.id;
    m.label = rec.label;
    m.out_degree = tree.out_degree(rec.id);
    m.degree = tree.degree(rec.id);
    m.clustering = clustering_from_edges(count_neighbor_edges(adj, rec.id, stamp, ++mark), m.degree);
    m.descendants = desc[rec.id.index];
    m.dist_to_01 = dist.to_01[rec.id.index];
    m.dist_to_root_clique = dist.to_root_clique[rec.id.index];
    rows.push_back(m);
  }
  return rows;
}

void write_metrics_csv(std::ostream& os, const KTree& tree, const std::vector<NodeMetrics>& rows) {
  os << "label,outdeg,deg,clustering_num,clustering_den,descendants,dist01,distK0\n";
  for (const auto& r : rows) {
    os << tree.name(r.id) << ',' << r.out_degree << ',' << r.degree << ',' << r.clustering.num << ','
       << r.clustering.den << ',' << r.descendants << ',' << r.dist_to_01 << ',' << r.dist_to_root_clique << '\n';
  }
}

}  // namespace ktree::metrics
