#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ktree/rng.hpp"

namespace ktree {

/// Dense node index. Root nodes 0_1..0_k occupy indices 0..k-1; the node
/// inserted at step j has index k-1+j.
struct NodeId {
  std::uint32_t index = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

using CliqueId = std::uint32_t;

struct NodeRecord {
  NodeId id;
  /// Numeric label: 0 for every root node, j for the j-th inserted node.
  std::uint32_t label = 0;
  std::optional<CliqueId> parent_clique;
  /// Adjacent higher-labelled nodes in insertion order.
  std::vector<NodeId> out_neighbors;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct CliqueRecord {
  std::vector<NodeId> members;
  /// Labels of the nodes attached to this clique, in child order.
  std::vector<std::uint32_t> children;

  std::size_t child_count() const noexcept { return children.size(); }
  std::size_t slot_count() const noexcept { return children.size() + 1; }

  friend bool operator==(const CliqueRecord&, const CliqueRecord&) = default;
};

/// Slot choices s_1..s_n with 1 <= s_i <= 1 + (k+1)(i-1).
struct InsertionTrace {
  int k = 1;
  std::vector<std::uint64_t> choices;

  friend bool operator==(const InsertionTrace&, const InsertionTrace&) = default;
};

/// Position of a slot in the canonical order: a clique and a 1-based child
/// position within it.
struct SlotLocation {
  CliqueId clique = 0;
  std::size_t position = 1;

  friend bool operator==(const SlotLocation&, const SlotLocation&) = default;
};

/// Ordered increasing k-tree.
///
/// Slots are ordered by clique creation time (root clique first, then the k
/// cliques of each insertion in removal-index order), and within a clique by
/// child position 1..(child count)+1. Inserting at slot s places the new node at that
/// position among the clique's ordered children.
class KTree {
 public:
  explicit KTree(int k);

  int k() const noexcept { return k_; }
  /// Number of inserted (non-root) nodes.
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(nodes_.size()) - k_; }
  std::uint64_t slot_count() const noexcept { return 1 + static_cast<std::uint64_t>(k_ + 1) * size(); }

  std::span<const NodeRecord> nodes() const noexcept { return nodes_; }
  std::span<const CliqueRecord> cliques() const noexcept { return cliques_; }

  const NodeRecord& node(NodeId id) const;
  const CliqueRecord& clique(CliqueId id) const;

  /// Root node 0_r, 1 <= r <= k.
  NodeId root(int r) const;
  /// The j-th inserted node, 1 <= j <= size().
  NodeId inserted(std::uint32_t j) const;
  bool is_root(NodeId id) const noexcept { return id.index < static_cast<std::uint32_t>(k_); }
  bool contains(NodeId id) const noexcept { return id.index < nodes_.size(); }

  /// "0_r" for root nodes, the decimal label otherwise.
  std::string name(NodeId id) const;
  /// Inverse of name().
  std::optional<NodeId> find(std::string_view name) const;

  /// Members of the parent clique; empty for root nodes.
  std::span<const NodeId> parents(NodeId id) const;
  /// All adjacent nodes of the underlying simple graph, sorted by index.
  std::vector<NodeId> neighbors(NodeId id) const;

  std::size_t out_degree(NodeId id) const { return node(id).out_neighbors.size(); }
  std::size_t degree(NodeId id) const;
  std::uint64_t edge_count() const noexcept;

  SlotLocation locate_slot(std::uint64_t slot) const;
  std::uint64_t slot_index(SlotLocation where) const;

  /// Attach node size()+1 at the given canonical slot; returns its label.
  std::uint32_t insert_at(std::uint64_t slot);
  std::uint32_t insert_at(SlotLocation where);

  friend bool operator==(const KTree& a, const KTree& b) {
    return a.k_ == b.k_ && a.nodes_ == b.nodes_ && a.cliques_ == b.cliques_;
  }

 private:
  // Fenwick tree over per-clique slot counts (child count + 1) in creation order.
  void fenwick_push(std::uint64_t value);
  void fenwick_add(std::size_t index, std::uint64_t delta);
  std::uint64_t fenwick_prefix(std::size_t count) const;

  int k_;
  std::vector<NodeRecord> nodes_;
  std::vector<CliqueRecord> cliques_;
  std::vector<std::uint64_t> fenwick_;  // 1-based, fenwick_[0] unused
};

KTree new_ktree(int k);

/// One step of the evolution process: draws a slot uniformly from
/// 1..slot_count(), which attaches to clique K with probability
/// (child count + 1)/slot_count(). Returns the chosen slot.
std::uint64_t evolve_step(KTree& tree, Rng& rng);

struct Evolution {
  KTree tree;
  InsertionTrace trace;
};

Evolution evolve(int k, std::uint32_t n, Rng& rng);
Evolution evolve(int k, std::uint32_t n, std::uint64_t seed);

KTree replay(const InsertionTrace& trace);

/// Line-oriented text form:
///   ktree k=<k> n=<n>
///   node <j> clique <cid>                      (one per inserted node)
///   clique <cid> members <l1,...,lk> children <c1,...,cd>   (one per clique)
/// Root members are written 0_1..0_k; an empty child list is written "-".
std::string serialize(const KTree& tree);
KTree deserialize(std::string_view text);

std::string serialize_trace(const InsertionTrace& trace);
InsertionTrace deserialize_trace(std::string_view text);

}  // namespace ktree
