#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace ktree::exact {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Generalized binomial x(x-1)...(x-n+1)/n!, exact.
Rational gbin(const Rational& x, long n);
/// Same quantity in double precision with sign handling for negative and
/// integer x. Large n goes through log-gamma differences.
double gbin_float(double x, long n);

/// Product of the arithmetic progression first, first+step, ... (count terms).
BigInt progression_product(const BigInt& first, const BigInt& step, std::uint64_t count);

/// Number of ordered increasing k-trees of size n: prod_{l<n} (1+(k+1)l).
BigInt count_trees(int k, std::uint64_t n);
/// Same count through n!(k+1)^n binom(n - k/(k+1), n).
BigInt count_trees_binomial(int k, std::uint64_t n);
/// Trees whose root clique has exactly one child: (n-1)!(k+1)^(n-1) binom(n-1-1/(k+1), n-1), n >= 1.
BigInt count_S(int k, std::uint64_t n);

// Out-degree of node j in a random tree of size n. Support 0..n-j.
Rational pmf_outdegree(int k, std::uint64_t n, std::uint64_t j, std::uint64_t m);
/// Probabilities for m = 0..min(max_m, n-j) sharing one set of big-integer
/// products; usable for n in the tens of thousands.
std::vector<Rational> outdegree_pmf_table(int k, std::uint64_t n, std::uint64_t j, std::uint64_t max_m);

// Out-degree of the root node 0_1. Support 0..n.
Rational pmf_root_outdegree(int k, std::uint64_t n, std::uint64_t m);
std::vector<Rational> root_outdegree_pmf_table(int k, std::uint64_t n, std::uint64_t max_m);

// Out-degree of a uniformly chosen inserted node. Support 0..n-1.
Rational pmf_random_outdegree(int k, std::uint64_t n, std::uint64_t m);
std::vector<Rational> random_outdegree_pmf_table(int k, std::uint64_t n, std::uint64_t max_m);
/// Limit law p_m = (k+1) / (k (m+1) binom(m+2+1/k, m+1)).
Rational limit_random_outdegree(int k, std::uint64_t m);
double limit_random_outdegree_float(int k, std::uint64_t m);
/// P{limit >= m} = Gamma(2+1/k) Gamma(m+1) / Gamma(m+2+1/k).
double limit_random_outdegree_tail(int k, std::uint64_t m);

// Descendants of node j (j itself included). Support 1..n-j+1.
Rational pmf_descendants(int k, std::uint64_t n, std::uint64_t j, std::uint64_t m);
double pmf_descendants_float(int k, std::uint64_t n, std::uint64_t j, std::uint64_t m);
/// Entry i holds P{X = i+1}, i = 0..n-j.
std::vector<double> descendants_pmf_float_table(int k, std::uint64_t n, std::uint64_t j);

// Descendants of a uniformly chosen inserted node. Support 1..n.
Rational pmf_random_descendants(int k, std::uint64_t n, std::uint64_t m);
std::vector<Rational> random_descendants_pmf_table(int k, std::uint64_t n, std::uint64_t max_m);
/// Limit law k / ((k+1)(m + k/(k+1))(m - 1/(k+1))), m >= 1.
Rational limit_random_descendants(int k, std::uint64_t m);

// Moments of the limit laws.
/// E(Y^s) for n^{-k/(k+1)} Y_{n,j}, j fixed: s! Gamma(j+1/(k+1)) / Gamma(j+1+k(s-1)/(k+1)).
double limit_moment_outdegree(int k, std::uint64_t j, unsigned s);
/// E(Y^s) for the normalized root out-degree.
double limit_moment_root_outdegree(int k, unsigned s);
/// E(X^s) for X_{n,j}/n, j fixed: binom(s-1/(k+1), s) / binom(s+j-k/(k+1), s).
double limit_moment_descendants(int k, std::uint64_t j, unsigned s);
/// E(X^s) for (j/n) X_{n,j}, j -> infinity, j = o(n): s! binom(s-1/(k+1), s).
double limit_moment_descendants_small_j(int k, unsigned s);

/// Sum of a pmf table and the float value of a rational, for reporting.
double to_double(const Rational& q);

}  // namespace ktree::exact
