#include <doctest.h>

#include <cmath>

#include "ktree/error.hpp"
#include "ktree/exact.hpp"
#include "ktree/oracle.hpp"
#include "literal.hpp"

using namespace ktree;
using namespace ktree::exact;
using literal::q;

TEST_CASE("generalized binomial") {
  CHECK(gbin(q(7, 3), 0) == 1);
  CHECK(gbin(Rational(3), 5) == 0);
  CHECK(gbin(Rational(5), 2) == 10);
  CHECK(gbin(q(1, 2), 2) == q(-1, 8));
  CHECK(gbin(Rational(-2), 3) == -4);  // (-2)(-3)(-4)/6
  CHECK_THROWS_AS(gbin(Rational(1), -1), Error);
  for (long n = 0; n <= 40; n += 3)
    for (auto x : {q(1, 3), q(-5, 4), q(17, 2), q(-7, 1), q(9, 1), q(250, 3)})
      CHECK(gbin_float(x.get_d(), n) == doctest::Approx(gbin(x, n).get_d()).epsilon(1e-11));
  // Large n through log-gamma.
  CHECK(gbin_float(200.5, 100) == doctest::Approx(gbin(q(401, 2), 100).get_d()).epsilon(1e-10));
  CHECK(gbin_float(-0.25, 60) == doctest::Approx(gbin(q(-1, 4), 60).get_d()).epsilon(1e-10));
}

TEST_CASE("progression product") {
  CHECK(progression_product(1, 1, 10) == 3628800);
  CHECK(progression_product(5, 0, 3) == 125);
  CHECK(progression_product(7, 3, 0) == 1);
  BigInt direct = 1;
  for (int i = 0; i < 100; ++i) direct *= 3 + 4 * i;
  CHECK(progression_product(3, 4, 100) == direct);
}

TEST_CASE("tree counts") {
  CHECK(count_trees(2, 2) == 4);
  CHECK(count_trees(1, 4) == 105);
  CHECK(count_trees(3, 3) == 45);
  CHECK(count_trees(2, 0) == 1);
  for (int k = 1; k <= 6; ++k)
    for (std::uint64_t n = 0; n <= 30; ++n) CHECK(count_trees(k, n) == count_trees_binomial(k, n));
}

TEST_CASE("trees whose root clique has one child") {
  for (int k = 1; k <= 3; ++k)
    for (std::uint32_t n = 1; n <= 5; ++n) {
      std::uint64_t hits = 0;
      oracle::enumerate_all(k, n, [&](const KTree& t, const InsertionTrace&) { hits += t.clique(0).child_count() == 1; });
      CHECK(count_S(k, n) == static_cast<unsigned long>(hits));
    }
}

TEST_CASE("factored pmfs equal the literal sums") {
  for (int k = 1; k <= 3; ++k)
    for (long n = 1; n <= 10; ++n) {
      for (long j = 1; j <= n; ++j) {
        const auto table = outdegree_pmf_table(k, n, j, n);
        CHECK(table.size() == static_cast<std::size_t>(n - j + 1));
        for (long m = 0; m <= n - j + 1; ++m) {
          const auto ref = literal::outdegree(k, n, j, m);
          CHECK(pmf_outdegree(k, n, j, m) == ref);
          if (m <= n - j) CHECK(table[m] == ref);
          CHECK(pmf_descendants(k, n, j, m + 1) == literal::descendants(k, n, j, m + 1));
        }
      }
      for (long m = 0; m <= n + 1; ++m) {
        CHECK(pmf_root_outdegree(k, n, m) == literal::root_outdegree(k, n, m));
        CHECK(pmf_random_outdegree(k, n, m) == literal::random_outdegree(k, n, m));
        CHECK(pmf_random_descendants(k, n, m + 1) == literal::random_descendants(k, n, m + 1));
      }
    }
}

TEST_CASE("pmfs sum to one and vanish outside their support") {
  for (int k = 1; k <= 4; ++k)
    for (std::uint64_t n : {1u, 5u, 17u, 40u}) {
      Rational root = 0, rnd = 0, rdesc = 0;
      for (auto& p : root_outdegree_pmf_table(k, n, n)) root += p;
      for (auto& p : random_outdegree_pmf_table(k, n, n)) rnd += p;
      for (auto& p : random_descendants_pmf_table(k, n, n)) rdesc += p;
      CHECK(root == 1);
      CHECK(rnd == 1);
      CHECK(rdesc == 1);
      for (std::uint64_t j = 1; j <= n; j += 3) {
        Rational a = 0, b = 0;
        for (auto& p : outdegree_pmf_table(k, n, j, n)) a += p;
        for (std::uint64_t m = 1; m <= n - j + 1; ++m) b += pmf_descendants(k, n, j, m);
        CHECK(a == 1);
        CHECK(b == 1);
        CHECK(pmf_outdegree(k, n, j, n - j + 1) == 0);
        CHECK(pmf_descendants(k, n, j, 0) == 0);
        CHECK(pmf_descendants(k, n, j, n - j + 2) == 0);
      }
    }
  CHECK(pmf_outdegree(2, 6, 6, 0) == 1);
  CHECK(pmf_descendants(3, 9, 9, 1) == 1);
  CHECK_THROWS_AS(pmf_outdegree(2, 3, 4, 0), Error);
  CHECK_THROWS_AS(pmf_outdegree(0, 3, 1, 0), Error);
}

TEST_CASE("root out-degree and random out-degree for k=2, n=2") {
  // Four trees: node 1 always under the root clique; node 2 under it in 2 of 4.
  CHECK(pmf_outdegree(2, 2, 1, 0) == q(1, 2));
  CHECK(pmf_outdegree(2, 2, 1, 1) == q(1, 2));
  CHECK(pmf_root_outdegree(2, 2, 1) == q(1, 4));
  CHECK(pmf_root_outdegree(2, 2, 2) == q(3, 4));
}

TEST_CASE("limit laws") {
  for (int k = 1; k <= 4; ++k) {
    for (std::uint64_t m = 0; m <= 30; ++m) {
      CHECK(limit_random_outdegree(k, m) == literal::limit_outdegree(k, m));
      CHECK(limit_random_outdegree_float(k, m) == doctest::Approx(limit_random_outdegree(k, m).get_d()).epsilon(1e-12));
      CHECK(limit_random_descendants(k, m + 1) == literal::limit_descendants(k, m + 1));
    }
    // Tail identity against a direct partial sum.
    double partial = 0;
    for (std::uint64_t m = 0; m < 25; ++m) partial += limit_random_outdegree_float(k, m);
    CHECK(limit_random_outdegree_tail(k, 25) == doctest::Approx(1 - partial).epsilon(1e-10));
    CHECK(limit_random_outdegree_tail(k, 0) == doctest::Approx(1.0));
    // Descendant limit telescopes: P{>= M} = k/((k+1)(M - 1/(k+1))) ... check by sum.
    Rational s = 0;
    for (std::uint64_t m = 1; m <= 200; ++m) s += limit_random_descendants(k, m);
    CHECK(s.get_d() < 1);
    CHECK(s.get_d() > 0.99);
  }
}

TEST_CASE("finite pmfs approach the limit laws") {
  for (int k = 1; k <= 3; ++k) {
    const auto t = random_outdegree_pmf_table(k, 400, 10);
    const auto d = random_descendants_pmf_table(k, 400, 10);
    for (std::uint64_t m = 0; m < 10; ++m) {
      CHECK(t[m].get_d() == doctest::Approx(limit_random_outdegree_float(k, m)).epsilon(0.02));
      CHECK(d[m].get_d() == doctest::Approx(limit_random_descendants(k, m + 1).get_d()).epsilon(0.02));
    }
  }
}

TEST_CASE("float descendant pmf matches exact values") {
  for (int k = 1; k <= 3; ++k)
    for (std::uint64_t n : {10u, 60u}) {
      for (std::uint64_t j : {1ul, 2ul, n / 2, n}) {
        const auto table = descendants_pmf_float_table(k, n, j);
        REQUIRE(table.size() == n - j + 1);
        for (std::uint64_t m = 1; m <= n - j + 1; ++m) {
          const double e = pmf_descendants(k, n, j, m).get_d();
          CHECK(pmf_descendants_float(k, n, j, m) == doctest::Approx(e).epsilon(1e-10));
          CHECK(table[m - 1] == doctest::Approx(e).epsilon(1e-10));
        }
      }
    }
  // Large n stays normalized.
  const auto big = descendants_pmf_float_table(2, 10000, 5000);
  double s = 0;
  for (double p : big) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("limit moments") {
  for (int k = 1; k <= 4; ++k) {
    const double a = static_cast<double>(k) / (k + 1);
    for (std::uint64_t j = 1; j <= 4; ++j) {
      CHECK(limit_moment_outdegree(k, j, 0) == doctest::Approx(1.0));
      const double b = j - 1 + 2.0 / (k + 1);
      double beta = 1;
      for (unsigned s = 0; s <= 5; ++s) {
        CHECK(limit_moment_descendants(k, j, s) == doctest::Approx(beta).epsilon(1e-12));
        beta *= (a + s) / (a + b + s);
      }
    }
    for (unsigned s = 0; s <= 5; ++s)
      CHECK(limit_moment_descendants_small_j(k, s) == doctest::Approx(std::tgamma(a + s) / std::tgamma(a)).epsilon(1e-12));
    CHECK(limit_moment_root_outdegree(k, 0) == doctest::Approx(1.0));
  }
}
