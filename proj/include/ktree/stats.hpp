#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ktree::stats {

/// Upper tail P{chi2_dof >= x}.
double chi_square_pvalue(double x, int dof);

double normal_cdf(double z);

/// One cell of a goodness-of-fit test.
struct Cell {
  double observed = 0;
  double expected = 0;
};

/// Adjacent cells merged left to right until each expected count is at least
/// min_expected; a short remainder joins the last merged cell.
std::vector<Cell> pool_cells(std::span<const Cell> cells, double min_expected = 5);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  std::size_t cells = 0;
};

/// Pearson test on pooled cells; an observation in a zero-probability cell
/// gives an infinite statistic.
ChiSquare chi_square(std::span<const Cell> cells, double min_expected = 5);

/// Kolmogorov-Smirnov distance between an integer-valued sample and the
/// normal law N(mean, sd^2). With continuity correction the empirical cdf at
/// integer x is compared against Phi((x + 1/2 - mean)/sd); without it the
/// supremum runs over both sides of every jump.
double ks_normal_lattice(std::span<const std::int64_t> sample, double mean, double sd, bool continuity);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double r2 = 0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Running mean and variance (Welford); merge is exact up to rounding.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x);
  void merge(const Moments& other);
  /// Unbiased sample variance.
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0; }
};

}  // namespace ktree::stats
