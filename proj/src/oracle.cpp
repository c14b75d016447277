#include "ktree/oracle.hpp"

#include <string>

namespace ktree::oracle {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::domain_error, what);
}

mpz_class big(std::int64_t v) { return mpz_class(static_cast<long>(v)); }

}  // namespace

mpz_class CountTable::at(std::uint64_t m) const {
  if (m < offset || m - offset >= values.size()) return 0;
  return values[m - offset];
}

mpz_class CountTable::total() const {
  mpz_class s = 0;
  for (const auto& v : values) s += v;
  return s;
}

CountTable recur_outdegree(int k, std::uint64_t n, std::uint64_t j) {
  require(k >= 1, "k must be >= 1");
  require(j >= 1 && j <= n, "recurrence needs n >= j >= 1");
  const auto kk = static_cast<std::int64_t>(k);
  CountTable t{k, n, j, 0, {exact::count_trees(k, j)}};
  for (std::uint64_t size = j + 1; size <= n; ++size) {
    const auto N = static_cast<std::int64_t>(size);
    const std::int64_t slots = 1 + (kk + 1) * (N - 1);
    std::vector<mpz_class> next(t.values.size() + 1);
    for (std::size_t m = 0; m < next.size(); ++m) {
      const auto mm = static_cast<std::int64_t>(m);
      // Out-degree m leaves (m+1)k slots that add a child to node j.
      const std::int64_t stay = slots - (mm + 1) * kk;
      if (stay != (kk + 1) * N - kk * mm - 2 * kk)
        throw Error(ErrorCode::domain_error, "out-degree recurrence coefficient identity failed");
      if (m < t.values.size()) {
        if (stay < 0) throw Error(ErrorCode::domain_error, "negative staying weight in out-degree recurrence");
        next[m] += big(stay) * t.values[m];
      }
      if (m >= 1) next[m] += big(kk * mm) * t.values[m - 1];
    }
    t.values = std::move(next);
  }
  t.n = n;
  return t;
}

CountTable recur_descendants(int k, std::uint64_t n, std::uint64_t j) {
  require(k >= 1, "k must be >= 1");
  require(j >= 1 && j <= n, "recurrence needs n >= j >= 1");
  const auto kk = static_cast<std::int64_t>(k);
  CountTable t{k, n, j, 1, {exact::count_trees(k, j)}};
  for (std::uint64_t size = j + 1; size <= n; ++size) {
    const auto N = static_cast<std::int64_t>(size);
    const std::int64_t slots = 1 + (kk + 1) * (N - 1);
    std::vector<mpz_class> next(t.values.size() + 1);
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const auto m = static_cast<std::int64_t>(idx) + 1;
      if (idx < t.values.size()) {
        const std::int64_t stay = slots - ((kk + 1) * m - 1);
        if (stay < 0) throw Error(ErrorCode::domain_error, "negative staying weight in descendant recurrence");
        next[idx] += big(stay) * t.values[idx];
      }
      if (idx >= 1) next[idx] += big((kk + 1) * (m - 1) - 1) * t.values[idx - 1];
    }
    t.values = std::move(next);
  }
  t.n = n;
  return t;
}

void check_budget(int k, std::uint64_t n, std::uint64_t cap) {
  const auto total = exact::count_trees(k, n);
  if (total > mpz_class(static_cast<unsigned long>(cap)))
    throw Error(ErrorCode::budget_exceeded, "T_n = " + total.get_str() + " exceeds enumeration cap " +
                                                std::to_string(cap));
}

DistributionTable exact_empirical_distribution(int k, std::uint32_t n, Parameter parameter, NodeSelector selector,
                                               std::uint64_t cap) {
  if ((selector.kind == NodeSelector::Kind::fixed && (selector.j < 1 || selector.j > n)) ||
      (selector.kind == NodeSelector::Kind::random_inserted && n == 0) ||
      (selector.kind == NodeSelector::Kind::last && n == 0))
    throw Error(ErrorCode::invalid_parameter, "selector " + selector.str() + " invalid for n = " + std::to_string(n));

  std::map<Fraction, mpz_class> counts;
  const auto visited = enumerate_all(
      k, n,
      [&](const KTree& tree, const InsertionTrace&) {
        switch (selector.kind) {
          case NodeSelector::Kind::fixed: ++counts[parameter_value(tree, parameter, tree.inserted(selector.j))]; break;
          case NodeSelector::Kind::last: ++counts[parameter_value(tree, parameter, tree.inserted(n))]; break;
          case NodeSelector::Kind::root: ++counts[parameter_value(tree, parameter, tree.root(1))]; break;
          case NodeSelector::Kind::random_inserted: {
            const auto values = parameter_values(tree, parameter);
            for (std::uint32_t j = 1; j <= n; ++j) ++counts[values[tree.inserted(j).index]];
            break;
          }
        }
      },
      cap);

  DistributionTable table;
  table.parameter = parameter;
  table.selector = selector;
  table.k = k;
  table.n = n;
  mpz_class total = mpz_class(static_cast<unsigned long>(visited));
  if (selector.kind == NodeSelector::Kind::random_inserted) total *= n;
  for (const auto& [v, c] : counts) {
    mpq_class q(c, total);
    q.canonicalize();
    table.exact[v] = q;
  }
  return table;
}

std::vector<DistributionTable> exact_distributions_all_j(int k, std::uint32_t n, Parameter parameter,
                                                         std::uint64_t cap) {
  std::vector<std::map<Fraction, std::uint64_t>> counts(n);
  const auto visited = enumerate_all(
      k, n,
      [&](const KTree& tree, const InsertionTrace&) {
        const auto values = parameter_values(tree, parameter);
        for (std::uint32_t j = 1; j <= n; ++j) ++counts[j - 1][values[tree.inserted(j).index]];
      },
      cap);
  std::vector<DistributionTable> out(n);
  for (std::uint32_t j = 1; j <= n; ++j) {
    auto& t = out[j - 1];
    t.parameter = parameter;
    t.selector = NodeSelector::fixed(j);
    t.k = k;
    t.n = n;
    for (const auto& [v, c] : counts[j - 1]) {
      mpq_class q(mpz_class(static_cast<unsigned long>(c)), mpz_class(static_cast<unsigned long>(visited)));
      q.canonicalize();
      t.exact[v] = q;
    }
  }
  return out;
}

}  // namespace ktree::oracle
