#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "ktree/distribution.hpp"
#include "ktree/error.hpp"
#include "ktree/exact.hpp"
#include "ktree/ktree.hpp"

namespace ktree::oracle {

inline constexpr std::uint64_t kDefaultEnumerationCap = 5'000'000;

/// Number of size-n trees in which node j has parameter value m, for m in
/// offset .. offset + values.size() - 1.
struct CountTable {
  int k = 1;
  std::uint64_t n = 0;
  std::uint64_t j = 0;
  std::uint64_t offset = 0;
  std::vector<mpz_class> values;

  mpz_class at(std::uint64_t m) const;
  mpz_class total() const;
};

/// Bottom-up recurrence for the out-degree of node j:
///   T(n,m) = ((k+1)n - km - 2k) T(n-1,m) + km T(n-1,m-1),  T(j,0) = T_j.
CountTable recur_outdegree(int k, std::uint64_t n, std::uint64_t j);

/// Bottom-up recurrence for the descendant count of node j. With m
/// descendants, (k+1)m - 1 of the 1+(k+1)(n-1) slots grow the set:
///   N(n,m) = (1+(k+1)(n-1) - ((k+1)m-1)) N(n-1,m) + ((k+1)(m-1)-1) N(n-1,m-1),  N(j,1) = T_j.
CountTable recur_descendants(int k, std::uint64_t n, std::uint64_t j);

/// Checks that T_n for (k, n) fits the cap; throws budget-exceeded otherwise.
void check_budget(int k, std::uint64_t n, std::uint64_t cap);

/// Visits every ordered increasing k-tree of size n whose trace starts with
/// `prefix`, exactly once, by stepping a mixed-radix counter over insertion
/// traces and replaying each. Returns the number of trees visited.
template <class Visitor>
std::uint64_t enumerate_all(int k, std::uint32_t n, Visitor&& visit, std::uint64_t cap = kDefaultEnumerationCap,
                            std::span<const std::uint64_t> prefix = {}) {
  check_budget(k, n, cap);
  if (prefix.size() > n) throw Error(ErrorCode::invalid_trace, "prefix longer than n");
  InsertionTrace trace{k, std::vector<std::uint64_t>(n, 1)};
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const auto bound = 1 + static_cast<std::uint64_t>(k + 1) * i;
    if (prefix[i] < 1 || prefix[i] > bound) throw Error(ErrorCode::invalid_trace, "prefix choice out of range");
    trace.choices[i] = prefix[i];
  }
  std::uint64_t visited = 0;
  while (true) {
    const KTree tree = replay(trace);
    visit(tree, trace);
    ++visited;
    std::size_t pos = n;
    bool exhausted = true;
    while (pos > prefix.size()) {
      --pos;
      if (trace.choices[pos] < 1 + static_cast<std::uint64_t>(k + 1) * pos) {
        ++trace.choices[pos];
        exhausted = false;
        break;
      }
      trace.choices[pos] = 1;
    }
    if (exhausted) return visited;
  }
}

/// Exact pmf of a node parameter over all trees of size n (each tree weighted
/// 1/T_n; a random inserted node adds weight 1/(n T_n) per node).
DistributionTable exact_empirical_distribution(int k, std::uint32_t n, Parameter parameter, NodeSelector selector,
                                               std::uint64_t cap = kDefaultEnumerationCap);

/// Exact pmfs of one parameter for every fixed j = 1..n from a single pass
/// over all trees. Entry j-1 holds node j's table.
std::vector<DistributionTable> exact_distributions_all_j(int k, std::uint32_t n, Parameter parameter,
                                                         std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace ktree::oracle
