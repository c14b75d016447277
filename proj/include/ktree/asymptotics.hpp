#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace ktree::asym {

/// A limit law with its pmf/pdf and moments.
class LawDescriptor {
 public:
  enum class Family { exponential, geometric, beta, gamma, negative_binomial, gaussian, point_mass, moment_sequence };

  static LawDescriptor exponential(double rate);
  /// P{m} = p (1-p)^m, m >= 0.
  static LawDescriptor geometric(double success);
  static LawDescriptor beta(double a, double b);
  /// Shape a, scale theta.
  static LawDescriptor gamma(double shape, double scale);
  /// P{m} = binom(m+r-1, m) p^r (1-p)^m, m >= 0.
  static LawDescriptor negative_binomial(double r, double p);
  static LawDescriptor gaussian(double mean, double sd);
  static LawDescriptor point_mass(double at);
  /// Law known only through its moment sequence s -> E(X^s).
  static LawDescriptor moment_sequence(std::function<double(unsigned)> moments);

  Family family() const noexcept { return family_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  bool is_discrete() const noexcept;

  /// Probability of integer m; discrete families only.
  double pmf(std::int64_t m) const;
  /// Density at x; continuous families only.
  double pdf(double x) const;
  double cdf(double x) const;
  /// E(X^s).
  double moment(unsigned s) const;
  double mean() const { return moment(1); }

 private:
  LawDescriptor(Family f, std::vector<double> p) : family_(f), params_(std::move(p)) {}

  Family family_;
  std::vector<double> params_;
  std::function<double(unsigned)> moments_;
};

std::string_view to_string(LawDescriptor::Family f);

enum class Quantity { degree, descendants };
enum class Region { fixed_j, small_j, central, large_j };

struct RegimeParams {
  std::uint64_t j = 1;  // fixed_j
  double rho = 0.5;     // central, 0 < rho < 1
};

/// Limit law of the out-degree (degree) or descendant count of node j in the
/// given growth region of j = j(n):
///   degree:      fixed j  -> moment sequence of n^{-k/(k+1)} Y_{n,j}
///                small j  -> Exp(1) for (j/n)^{k/(k+1)} Y_{n,j}
///                central  -> Geom(rho^{k/(k+1)})
///                large j  -> point mass at 0
///   descendants: fixed j  -> Beta(k/(k+1), j-1+2/(k+1)) for X_{n,j}/n
///                small j  -> Gamma(k/(k+1), 1) for (j/n) X_{n,j}
///                central  -> NegBin(k/(k+1), rho) for X_{n,j} - 1
///                large j  -> point mass at 1
LawDescriptor regime_law(int k, Quantity quantity, Region region, RegimeParams params = {});

/// Limit of the expected local clustering coefficient, summed as a series
/// with a rigorous tail bound: the remainder after M terms is at most
/// f(M+k) P{limit out-degree >= M} with f the decreasing clustering formula.
double clustering_constant(int k, double tol = 1e-12);
/// Closed forms with the trigamma function, available for k = 2..6.
std::optional<double> clustering_constant_closed_form(int k);
/// Term m of the clustering series.
double clustering_series_term(int k, std::uint64_t m);

struct DistanceParams {
  int k = 1;
  double harmonic = 1;         // H_k
  double harmonic2 = 1;        // H_k^(2)
  double mean_coefficient = 0.5;      // 1/((k+1)H_k)
  double variance_coefficient = 0.5;  // H_k^(2)/((k+1)H_k^3)
};

DistanceParams distance_params(int k);

struct CharRoots {
  int k = 1;
  double v = 1;
  /// All k roots; roots[0] continues the root k/(k+1) at v = 1.
  std::vector<std::complex<double>> roots;
  double max_residual = 0;
};

/// Coefficients (ascending powers) of prod_{r<k} (a - r/(k+1)) - k! v/(k+1)^k.
std::vector<double> char_polynomial(int k, double v);

/// Roots of the characteristic equation prod_{r<k} (a - r/(k+1)) = k! v/(k+1)^k.
/// Roots come from companion-matrix eigenvalues with one Newton polish each.
/// The continuation of k/(k+1) is tracked from v = 1 in small steps by
/// nearest match.
CharRoots char_roots(int k, double v);

/// d alpha_1/dv at v = 1 by implicit differentiation of the characteristic
/// equation: k!/(k+1)^k divided by the polynomial's derivative at k/(k+1).
double alpha1_derivative(int k);

}  // namespace ktree::asym
