#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ktree/asymptotics.hpp"
#include "ktree/distribution.hpp"
#include "ktree/rng.hpp"
#include "ktree/stats.hpp"

namespace ktree::harness {

struct ExperimentConfig {
  int k = 2;
  std::uint32_t n = 10;
  Parameter parameter = Parameter::outdegree;
  NodeSelector selector = NodeSelector::last();
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Throws invalid_parameter when the config cannot be run.
void validate(const ExperimentConfig& config);

/// Empirical distribution over independent trees. Replicate r draws from
/// Rng::stream(seed, r), so the result does not depend on the thread count.
DistributionTable mc_distribution(const ExperimentConfig& config);

/// One tree per replicate, the parameter read at every inserted node j; entry
/// j-1 is the empirical table of node j.
std::vector<DistributionTable> mc_distributions_all_j(int k, std::uint32_t n, Parameter parameter,
                                                      std::uint64_t replicates, std::uint64_t seed,
                                                      unsigned threads = 1);

struct ComparisonReport {
  double total_variation = 0;
  double chi_square = 0;
  int dof = 0;
  double p_value = 1;
  double max_abs_deviation = 0;
  std::uint64_t sample_size = 0;
  std::size_t cells = 0;  // after pooling
};

/// Empirical (or exact) table against an exact reference table.
ComparisonReport compare(const DistributionTable& empirical, const DistributionTable& reference);
/// Empirical table against a discrete limit law on the integers; the law's
/// tail beyond the observed range forms one pooled cell.
ComparisonReport compare(const DistributionTable& empirical, const asym::LawDescriptor& reference);

/// Incremental sampler that keeps only what the distance to 0_1 needs: clique
/// members, one owner entry per slot, and per-node distances. A node's
/// distance is fixed at insertion (1 + nearest parent) because every later
/// neighbour joins through a clique that already contains a shortcut.
class DistanceSampler {
 public:
  explicit DistanceSampler(int k, std::uint32_t reserve_nodes = 0);

  void reset();
  /// Insert one node; returns its distance to 0_1.
  std::uint32_t step(Rng& rng);
  /// Insert below a given clique (for replay against the full structure).
  std::uint32_t step_at(std::uint32_t clique);

  int k() const noexcept { return k_; }
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(dist_.size()) - k_; }
  /// Distance of inserted node j to 0_1.
  std::uint32_t distance(std::uint32_t j) const { return dist_[static_cast<std::size_t>(k_) - 1 + j]; }
  std::uint32_t last_clique() const noexcept { return last_clique_; }

 private:
  int k_;
  std::vector<std::uint32_t> members_;  // k per clique, node indices
  std::vector<std::uint32_t> owner_;    // one entry per slot
  std::vector<std::uint16_t> dist_;     // by node index, roots first
  std::uint32_t last_clique_ = 0;
};

struct DistanceRow {
  std::uint64_t n = 0;
  double mean_last = 0, var_last = 0;      // D_n
  double mean_random = 0, var_random = 0;  // random inserted node
};

struct DistanceReport {
  int k = 1;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  asym::DistanceParams expected;
  std::vector<DistanceRow> rows;
  // Fits against log n.
  stats::LinearFit mean_last, var_last, mean_random, var_random;
  // Standardized D_n at the largest size against the normal law.
  double ks_last = 0;      // with continuity correction
  double ks_last_raw = 0;  // without
};

/// Grows one tree per replicate to the largest ladder size and reads D and a
/// random inserted node's distance at every ladder size along the way; the
/// prefix of a tree of size N is a tree of size n with the right law.
DistanceReport distance_experiment(int k, std::span<const std::uint64_t> ladder, std::uint64_t replicates,
                                   std::uint64_t seed, unsigned threads = 1);

/// Run fn(first, last) over [0, count) split into contiguous blocks.
void parallel_blocks(std::uint64_t count, unsigned threads,
                     const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn);

}  // namespace ktree::harness
