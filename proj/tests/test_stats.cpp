#include <doctest.h>

#include <cmath>
#include <random>

#include "ktree/error.hpp"
#include "ktree/stats.hpp"

using namespace ktree;
using namespace ktree::stats;

TEST_CASE("chi-square tail") {
  CHECK(chi_square_pvalue(0, 3) == doctest::Approx(1));
  CHECK(chi_square_pvalue(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_pvalue(2 * std::log(20.0), 2) == doctest::Approx(0.05).epsilon(1e-12));  // exp(-x/2)
  CHECK(chi_square_pvalue(5, 0) == 1);
  CHECK(chi_square_pvalue(INFINITY, 4) == 0);
}

TEST_CASE("pooling keeps expected counts at five or more") {
  const Cell cells[] = {{1, 0.5}, {2, 1}, {10, 8}, {3, 3}, {1, 1.5}, {6, 6}, {0, 0.2}};
  const auto pooled = pool_cells(cells);
  REQUIRE(pooled.size() == 2);
  CHECK(pooled[0].expected == doctest::Approx(9.5));
  CHECK(pooled[0].observed == 13);
  // The short remainder joins the last cell.
  CHECK(pooled[1].expected == doctest::Approx(10.7));
  CHECK(pooled[1].observed == 10);
  const Cell small[] = {{1, 1}, {2, 2}};
  CHECK(pool_cells(small).size() == 1);
}

TEST_CASE("observations in impossible cells fail the test") {
  const Cell cells[] = {{50, 50}, {50, 50}, {1, 0}};
  const auto r = chi_square(cells);
  CHECK(std::isinf(r.statistic));
  CHECK(r.p_value == 0);
}

TEST_CASE("chi-square on a fair die") {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> die(0, 5);
  std::vector<Cell> cells(6, Cell{0, 10'000});
  for (int i = 0; i < 60'000; ++i) cells[die(gen)].observed++;
  const auto r = chi_square(cells);
  CHECK(r.dof == 5);
  CHECK(r.p_value > 1e-4);
  cells[0].observed += 600;
  cells[1].observed -= 600;
  CHECK(chi_square(cells).p_value < 1e-6);
}

TEST_CASE("lattice KS distance") {
  // Two atoms at 0 and 1 against N(0.5, 0.25): the corrected cdf matches at
  // the midpoint, leaving the mass outside [-1/2, 3/2].
  const std::int64_t sample[] = {0, 0, 1, 1};
  CHECK(ks_normal_lattice(sample, 0.5, 0.5, true) == doctest::Approx(normal_cdf(-2)).epsilon(1e-12));
  CHECK(ks_normal_lattice(sample, 0.5, 0.5, false) == doctest::Approx(0.5 - normal_cdf(-1)).epsilon(1e-12));
  // Binomial(400, 1/2) is close to normal once corrected, far without.
  std::mt19937_64 gen(2);
  std::binomial_distribution<std::int64_t> bin(400, 0.5);
  std::vector<std::int64_t> s(20'000);
  for (auto& x : s) x = bin(gen);
  CHECK(ks_normal_lattice(s, 200, 10, true) < 0.012);
  CHECK(ks_normal_lattice(s, 200, 10, false) > 0.018);
  CHECK_THROWS_AS(ks_normal_lattice(std::span<const std::int64_t>{}, 0, 1, true), Error);
}

TEST_CASE("least squares") {
  const double x[] = {1, 2, 3, 4};
  const double y[] = {3, 5, 7, 9};
  const auto f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  CHECK(f.r2 == doctest::Approx(1));
  CHECK(f.slope_stderr == doctest::Approx(0).epsilon(1e-12));
  const double flat[] = {1, 1, 1, 1};
  CHECK_THROWS_AS(least_squares(flat, y), Error);
}

TEST_CASE("running moments merge") {
  Moments a, b, all;
  for (int i = 0; i < 100; ++i) {
    const double v = std::sin(i) * 10 + i * 0.1;
    (i < 37 ? a : b).add(v);
    all.add(v);
  }
  a.merge(b);
  CHECK(a.count == all.count);
  CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}
