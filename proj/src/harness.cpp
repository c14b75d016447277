#include "ktree/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "ktree/error.hpp"
#include "ktree/ktree.hpp"
#include "ktree/metrics.hpp"

namespace ktree::harness {

void parallel_blocks(std::uint64_t count, unsigned threads,
                     const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    fn(0, count, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t lo = count * t / threads, hi = count * (t + 1) / threads;
    pool.emplace_back([&, lo, hi, t] {
      try {
        fn(lo, hi, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void validate(const ExperimentConfig& c) {
  if (c.k < 1) throw Error(ErrorCode::invalid_parameter, "k must be >= 1");
  if (c.replicates < 1) throw Error(ErrorCode::invalid_parameter, "replicates must be >= 1");
  switch (c.selector.kind) {
    case NodeSelector::Kind::fixed:
      if (c.selector.j < 1 || c.selector.j > c.n)
        throw Error(ErrorCode::invalid_parameter, "node j must satisfy 1 <= j <= n");
      break;
    case NodeSelector::Kind::random_inserted:
    case NodeSelector::Kind::last:
      if (c.n < 1) throw Error(ErrorCode::invalid_parameter, c.selector.str() + " selector needs n >= 1");
      break;
    case NodeSelector::Kind::root: break;
  }
}

namespace {

using Histogram = std::map<Fraction, std::uint64_t>;

void merge_into(Histogram& into, const Histogram& from) {
  for (const auto& [v, c] : from) into[v] += c;
}

DistributionTable empirical_table(Parameter p, NodeSelector s, int k, std::uint64_t n, Histogram counts,
                                  std::uint64_t total) {
  DistributionTable t;
  t.parameter = p;
  t.selector = s;
  t.k = k;
  t.n = n;
  t.counts = std::move(counts);
  t.sample_size = total;
  return t;
}

}  // namespace

DistributionTable mc_distribution(const ExperimentConfig& c) {
  validate(c);
  const unsigned threads = std::max(1u, c.threads);
  std::vector<Histogram> local(threads);
  parallel_blocks(c.replicates, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned t) {
    auto& h = local[t];
    for (std::uint64_t r = lo; r < hi; ++r) {
      Rng rng = Rng::stream(c.seed, r);
      const auto evo = evolve(c.k, c.n, rng);
      NodeId node;
      switch (c.selector.kind) {
        case NodeSelector::Kind::fixed: node = evo.tree.inserted(c.selector.j); break;
        case NodeSelector::Kind::last: node = evo.tree.inserted(c.n); break;
        case NodeSelector::Kind::root: node = evo.tree.root(1); break;
        case NodeSelector::Kind::random_inserted:
          node = evo.tree.inserted(static_cast<std::uint32_t>(rng.below(c.n)) + 1);
          break;
      }
      ++h[parameter_value(evo.tree, c.parameter, node)];
    }
  });
  Histogram all;
  for (const auto& h : local) merge_into(all, h);
  return empirical_table(c.parameter, c.selector, c.k, c.n, std::move(all), c.replicates);
}

std::vector<DistributionTable> mc_distributions_all_j(int k, std::uint32_t n, Parameter parameter,
                                                      std::uint64_t replicates, std::uint64_t seed,
                                                      unsigned threads) {
  ExperimentConfig c{k, n, parameter, NodeSelector::last(), replicates, seed, threads};
  validate(c);
  threads = std::max(1u, threads);
  // Small integer-valued parameters go through flat arrays; the rest through maps.
  const bool dense = parameter == Parameter::outdegree || parameter == Parameter::degree ||
                     parameter == Parameter::descendants;
  const std::size_t width = static_cast<std::size_t>(n) + static_cast<std::size_t>(k) + 2;
  std::vector<std::vector<std::uint64_t>> flat(threads);
  std::vector<std::vector<Histogram>> maps(threads);
  parallel_blocks(replicates, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned t) {
    if (dense) flat[t].assign(static_cast<std::size_t>(n) * width, 0);
    else maps[t].resize(n);
    for (std::uint64_t r = lo; r < hi; ++r) {
      Rng rng = Rng::stream(seed, r);
      const auto evo = evolve(k, n, rng);
      if (dense) {
        std::vector<std::uint32_t> values;
        if (parameter == Parameter::descendants) {
          values = metrics::descendant_counts(evo.tree);
        } else {
          for (const auto& rec : evo.tree.nodes())
            values.push_back(static_cast<std::uint32_t>(parameter == Parameter::degree ? evo.tree.degree(rec.id)
                                                                                       : evo.tree.out_degree(rec.id)));
        }
        for (std::uint32_t j = 1; j <= n; ++j)
          ++flat[t][(j - 1) * width + values[evo.tree.inserted(j).index]];
      } else {
        const auto values = parameter_values(evo.tree, parameter);
        for (std::uint32_t j = 1; j <= n; ++j) ++maps[t][j - 1][values[evo.tree.inserted(j).index]];
      }
    }
  });
  std::vector<DistributionTable> out;
  for (std::uint32_t j = 1; j <= n; ++j) {
    Histogram h;
    for (unsigned t = 0; t < threads; ++t) {
      if (dense) {
        if (flat[t].empty()) continue;
        for (std::size_t v = 0; v < width; ++v)
          if (auto cnt = flat[t][(j - 1) * width + v])
            h[Fraction(static_cast<std::int64_t>(v))] += cnt;
      } else if (!maps[t].empty()) {
        merge_into(h, maps[t][j - 1]);
      }
    }
    out.push_back(empirical_table(parameter, NodeSelector::fixed(j), k, n, std::move(h), replicates));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

struct Pair {
  double p_hat = 0;  // empirical probability
  double q = 0;      // reference probability
  double observed = 0;
};

ComparisonReport finish(const std::vector<Pair>& cells, std::uint64_t sample_size) {
  ComparisonReport r;
  r.sample_size = sample_size;
  double tv = 0;
  std::vector<stats::Cell> chi;
  for (const auto& c : cells) {
    tv += std::abs(c.p_hat - c.q);
    r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(c.p_hat - c.q));
    chi.push_back({c.observed, c.q * static_cast<double>(sample_size)});
  }
  r.total_variation = std::clamp(tv / 2, 0.0, 1.0);
  if (sample_size > 0) {
    const auto test = stats::chi_square(chi);
    r.chi_square = test.statistic;
    r.dof = test.dof;
    r.p_value = test.p_value;
    r.cells = test.cells;
  }
  return r;
}

void require_sample(const DistributionTable& t) {
  if (t.is_exact() ? t.exact.empty() : t.counts.empty())
    throw Error(ErrorCode::empty_sample, "comparison against an empty sample");
}

}  // namespace

ComparisonReport compare(const DistributionTable& empirical, const DistributionTable& reference) {
  require_sample(empirical);
  if (!reference.is_exact()) throw Error(ErrorCode::invalid_parameter, "reference table must be exact");
  const auto phat = empirical.pmf();
  const auto q = reference.pmf();
  std::map<Fraction, Pair> cells;
  for (const auto& [v, p] : phat) cells[v].p_hat = p;
  for (const auto& [v, p] : q) cells[v].q = p;
  if (!empirical.is_exact())
    for (const auto& [v, c] : empirical.counts) cells[v].observed = static_cast<double>(c);
  std::vector<Pair> flat;
  for (const auto& [v, c] : cells) flat.push_back(c);
  return finish(flat, empirical.is_exact() ? 0 : empirical.sample_size);
}

ComparisonReport compare(const DistributionTable& empirical, const asym::LawDescriptor& reference) {
  require_sample(empirical);
  if (!reference.is_discrete())
    throw Error(ErrorCode::invalid_parameter, "table comparison needs a discrete reference law");
  const auto phat = empirical.pmf();
  std::int64_t lo = 0, hi = 0;
  for (const auto& [v, p] : phat) {
    if (!v.is_integer()) throw Error(ErrorCode::invalid_parameter, "non-integer value against an integer law");
    lo = std::min(lo, v.num);
    hi = std::max(hi, v.num);
  }
  // Extend until the law's remaining mass is negligible.
  std::vector<Pair> cells;
  double mass = 0;
  std::int64_t m = lo;
  for (; m <= hi || (1 - mass > 1e-12 && m < hi + 10'000'000); ++m) {
    Pair c;
    c.q = m >= 0 ? reference.pmf(m) : 0;
    mass += c.q;
    const Fraction key(m);
    if (auto it = phat.find(key); it != phat.end()) c.p_hat = it->second;
    if (!empirical.is_exact())
      if (auto it = empirical.counts.find(key); it != empirical.counts.end())
        c.observed = static_cast<double>(it->second);
    cells.push_back(c);
  }
  if (!cells.empty()) cells.back().q += std::max(0.0, 1 - mass);
  return finish(cells, empirical.is_exact() ? 0 : empirical.sample_size);
}

// ---------------------------------------------------------------------------
// Distances

DistanceSampler::DistanceSampler(int k, std::uint32_t reserve_nodes) : k_(k) {
  if (k < 1) throw Error(ErrorCode::invalid_parameter, "k must be >= 1");
  const auto kk = static_cast<std::size_t>(k);
  members_.reserve((1 + kk * reserve_nodes) * kk);
  owner_.reserve(1 + (kk + 1) * reserve_nodes);
  dist_.reserve(kk + reserve_nodes);
  reset();
}

void DistanceSampler::reset() {
  members_.clear();
  owner_.clear();
  dist_.clear();
  for (int r = 0; r < k_; ++r) {
    members_.push_back(static_cast<std::uint32_t>(r));
    dist_.push_back(r == 0 ? 0 : 1);
  }
  owner_.push_back(0);
  last_clique_ = 0;
}

std::uint32_t DistanceSampler::step(Rng& rng) {
  return step_at(owner_[rng.below(owner_.size())]);
}

std::uint32_t DistanceSampler::step_at(std::uint32_t clique) {
  const auto kk = static_cast<std::size_t>(k_);
  if (clique >= members_.size() / kk) throw Error(ErrorCode::invalid_slot, "no clique " + std::to_string(clique));
  const auto id = static_cast<std::uint32_t>(dist_.size());
  const std::size_t base = static_cast<std::size_t>(clique) * kk;
  std::uint16_t best = std::numeric_limits<std::uint16_t>::max();
  for (std::size_t t = 0; t < kk; ++t) best = std::min(best, dist_[members_[base + t]]);
  dist_.push_back(static_cast<std::uint16_t>(best + 1));
  owner_.push_back(clique);

  auto next = static_cast<std::uint32_t>(members_.size() / kk);
  for (std::size_t removed = 0; removed < kk; ++removed) {
    for (std::size_t t = 0; t < kk; ++t)
      if (t != removed) members_.push_back(members_[base + t]);
    members_.push_back(id);
    owner_.push_back(next++);
  }
  last_clique_ = clique;
  return dist_.back();
}

DistanceReport distance_experiment(int k, std::span<const std::uint64_t> ladder, std::uint64_t replicates,
                                   std::uint64_t seed, unsigned threads) {
  if (ladder.size() < 4) throw Error(ErrorCode::invalid_parameter, "distance ladder needs at least 4 sizes");
  if (replicates < 2) throw Error(ErrorCode::invalid_parameter, "distance experiment needs >= 2 replicates");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw Error(ErrorCode::invalid_parameter, "ladder sizes must be >= 1");
    if (i && ladder[i] <= ladder[i - 1]) throw Error(ErrorCode::invalid_parameter, "ladder must increase");
  }
  const double ratio = static_cast<double>(ladder[1]) / static_cast<double>(ladder[0]);
  for (std::size_t i = 2; i < ladder.size(); ++i) {
    const double r = static_cast<double>(ladder[i]) / static_cast<double>(ladder[i - 1]);
    if (std::abs(r / ratio - 1) > 0.05) throw Error(ErrorCode::invalid_parameter, "ladder must be geometric");
  }
  if (ladder.back() > std::numeric_limits<std::uint32_t>::max() / static_cast<std::uint64_t>(k + 1))
    throw Error(ErrorCode::invalid_parameter, "ladder too large");

  const std::size_t L = ladder.size();
  const auto top = static_cast<std::uint32_t>(ladder.back());
  // values[r*L + i]: D at ladder size i; random[r*L + i]: random inserted node.
  std::vector<std::uint16_t> last(replicates * L), random(replicates * L);
  parallel_blocks(replicates, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    DistanceSampler sampler(k, top);
    for (std::uint64_t r = lo; r < hi; ++r) {
      Rng rng = Rng::stream(seed, r);
      sampler.reset();
      std::size_t i = 0;
      for (std::uint32_t n = 1; n <= top; ++n) {
        const auto d = sampler.step(rng);
        if (n == ladder[i]) {
          last[r * L + i] = static_cast<std::uint16_t>(d);
          random[r * L + i] = static_cast<std::uint16_t>(sampler.distance(static_cast<std::uint32_t>(rng.below(n)) + 1));
          ++i;
        }
      }
    }
  });

  DistanceReport rep;
  rep.k = k;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.expected = asym::distance_params(k);
  std::vector<double> logn, ml, vl, mr, vr;
  for (std::size_t i = 0; i < L; ++i) {
    stats::Moments a, b;
    for (std::uint64_t r = 0; r < replicates; ++r) {
      a.add(last[r * L + i]);
      b.add(random[r * L + i]);
    }
    rep.rows.push_back({ladder[i], a.mean, a.variance(), b.mean, b.variance()});
    logn.push_back(std::log(static_cast<double>(ladder[i])));
    ml.push_back(a.mean);
    vl.push_back(a.variance());
    mr.push_back(b.mean);
    vr.push_back(b.variance());
  }
  rep.mean_last = stats::least_squares(logn, ml);
  rep.var_last = stats::least_squares(logn, vl);
  rep.mean_random = stats::least_squares(logn, mr);
  rep.var_random = stats::least_squares(logn, vr);

  std::vector<std::int64_t> sample(replicates);
  for (std::uint64_t r = 0; r < replicates; ++r) sample[r] = last[r * L + L - 1];
  const auto& row = rep.rows.back();
  const double sd = std::sqrt(row.var_last);
  if (sd > 0) {
    rep.ks_last = stats::ks_normal_lattice(sample, row.mean_last, sd, true);
    rep.ks_last_raw = stats::ks_normal_lattice(sample, row.mean_last, sd, false);
  } else {
    rep.ks_last = rep.ks_last_raw = 1;
  }
  return rep;
}

}  // namespace ktree::harness
