#include "ktree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "ktree/error.hpp"

namespace ktree::stats {

double chi_square_pvalue(double x, int dof) {
  if (dof <= 0) return 1;
  if (!(x >= 0)) return x < 0 ? 1 : 0;
  if (std::isinf(x)) return 0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::vector<Cell> pool_cells(std::span<const Cell> cells, double min_expected) {
  std::vector<Cell> out;
  Cell acc;
  bool open = false;
  for (const auto& c : cells) {
    acc.observed += c.observed;
    acc.expected += c.expected;
    open = true;
    // Impossible cells stay separate so stray observations are not hidden.
    if (acc.expected >= min_expected || (c.expected == 0 && c.observed > 0)) {
      out.push_back(acc);
      acc = {};
      open = false;
    }
  }
  if (open) {
    if (out.empty()) {
      out.push_back(acc);
    } else {
      out.back().observed += acc.observed;
      out.back().expected += acc.expected;
    }
  }
  return out;
}

ChiSquare chi_square(std::span<const Cell> cells, double min_expected) {
  const auto pooled = pool_cells(cells, min_expected);
  ChiSquare out;
  out.cells = pooled.size();
  for (const auto& c : pooled) {
    if (c.expected <= 0) {
      if (c.observed > 0) out.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = c.observed - c.expected;
    out.statistic += d * d / c.expected;
  }
  out.dof = static_cast<int>(pooled.size()) - 1;
  out.p_value = std::isinf(out.statistic) ? 0 : chi_square_pvalue(out.statistic, out.dof);
  return out;
}

double ks_normal_lattice(std::span<const std::int64_t> sample, double mean, double sd, bool continuity) {
  if (sample.empty()) throw Error(ErrorCode::empty_sample, "KS distance of an empty sample");
  if (!(sd > 0)) throw Error(ErrorCode::domain_error, "KS reference sd must be positive");
  std::vector<std::int64_t> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double worst = 0;
  std::size_t i = 0;
  double below = 0;  // empirical cdf just left of the current atom
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double x = static_cast<double>(v[i]);
    const double at = static_cast<double>(j) / n;
    if (continuity) {
      worst = std::max(worst, std::abs(at - normal_cdf((x + 0.5 - mean) / sd)));
      // Gap before this atom, at the previous lattice point.
      worst = std::max(worst, std::abs(below - normal_cdf((x - 0.5 - mean) / sd)));
    } else {
      const double phi = normal_cdf((x - mean) / sd);
      worst = std::max({worst, std::abs(at - phi), std::abs(below - phi)});
    }
    below = at;
    i = j;
  }
  return worst;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::invalid_parameter, "least squares needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::domain_error, "least squares with constant x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double rss = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0 ? 1 - rss / syy : 1;
  f.slope_stderr = x.size() > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0;
  return f;
}

void Moments::add(double x) {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

void Moments::merge(const Moments& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double total = static_cast<double>(count + o.count);
  const double d = o.mean - mean;
  mean += d * static_cast<double>(o.count) / total;
  m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
  count += o.count;
}

}  // namespace ktree::stats
