#include "ktree/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "ktree/error.hpp"
#include "ktree/exact.hpp"

namespace ktree::asym {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::domain_error, what);
}

// Sum of x^s P{m} over m >= 0 until the terms vanish.
double discrete_moment(const LawDescriptor& law, unsigned s) {
  double sum = 0, mass = 0;
  for (std::int64_t m = 0; m < 100'000'000; ++m) {
    const double p = law.pmf(m);
    mass += p;
    sum += std::pow(static_cast<double>(m), s) * p;
    if (mass > 1 - 1e-16 && p * std::pow(static_cast<double>(m) + 1, s + 2) < 1e-18) break;
  }
  return sum;
}

}  // namespace

std::string_view to_string(LawDescriptor::Family f) {
  using F = LawDescriptor::Family;
  switch (f) {
    case F::exponential: return "exponential";
    case F::geometric: return "geometric";
    case F::beta: return "beta";
    case F::gamma: return "gamma";
    case F::negative_binomial: return "negative-binomial";
    case F::gaussian: return "gaussian";
    case F::point_mass: return "point-mass";
    case F::moment_sequence: return "moment-sequence";
  }
  return "?";
}

LawDescriptor LawDescriptor::exponential(double rate) {
  require(rate > 0, "exponential rate must be positive");
  return {Family::exponential, {rate}};
}

LawDescriptor LawDescriptor::geometric(double success) {
  require(success > 0 && success <= 1, "geometric success probability must lie in (0,1]");
  return {Family::geometric, {success}};
}

LawDescriptor LawDescriptor::beta(double a, double b) {
  require(a > 0 && b > 0, "beta parameters must be positive");
  return {Family::beta, {a, b}};
}

LawDescriptor LawDescriptor::gamma(double shape, double scale) {
  require(shape > 0 && scale > 0, "gamma parameters must be positive");
  return {Family::gamma, {shape, scale}};
}

LawDescriptor LawDescriptor::negative_binomial(double r, double p) {
  require(r > 0 && p > 0 && p <= 1, "negative binomial needs r > 0 and p in (0,1]");
  return {Family::negative_binomial, {r, p}};
}

LawDescriptor LawDescriptor::gaussian(double mean, double sd) {
  require(sd > 0, "gaussian sd must be positive");
  return {Family::gaussian, {mean, sd}};
}

LawDescriptor LawDescriptor::point_mass(double at) { return {Family::point_mass, {at}}; }

LawDescriptor LawDescriptor::moment_sequence(std::function<double(unsigned)> moments) {
  LawDescriptor law(Family::moment_sequence, {});
  law.moments_ = std::move(moments);
  return law;
}

bool LawDescriptor::is_discrete() const noexcept {
  return family_ == Family::geometric || family_ == Family::negative_binomial || family_ == Family::point_mass;
}

double LawDescriptor::pmf(std::int64_t m) const {
  switch (family_) {
    case Family::geometric: {
      if (m < 0) return 0;
      const double p = params_[0];
      return p * std::pow(1 - p, static_cast<double>(m));
    }
    case Family::negative_binomial: {
      if (m < 0) return 0;
      const double r = params_[0], p = params_[1];
      const double md = static_cast<double>(m);
      if (p == 1) return m == 0 ? 1 : 0;
      return std::exp(std::lgamma(md + r) - std::lgamma(r) - std::lgamma(md + 1) + r * std::log(p) +
                      md * std::log1p(-p));
    }
    case Family::point_mass: return static_cast<double>(m) == params_[0] ? 1.0 : 0.0;
    default: throw Error(ErrorCode::domain_error, std::string(to_string(family_)) + " law has no pmf");
  }
}

double LawDescriptor::pdf(double x) const {
  switch (family_) {
    case Family::exponential: return x < 0 ? 0 : params_[0] * std::exp(-params_[0] * x);
    case Family::beta: {
      if (x <= 0 || x >= 1) return 0;
      const double a = params_[0], b = params_[1];
      return std::pow(x, a - 1) * std::pow(1 - x, b - 1) / boost::math::beta(a, b);
    }
    case Family::gamma: {
      if (x <= 0) return 0;
      const double a = params_[0], t = params_[1];
      return std::exp((a - 1) * std::log(x / t) - x / t - std::lgamma(a)) / t;
    }
    case Family::gaussian: {
      const double z = (x - params_[0]) / params_[1];
      return std::exp(-0.5 * z * z) / (params_[1] * std::sqrt(2 * std::numbers::pi));
    }
    default: throw Error(ErrorCode::domain_error, std::string(to_string(family_)) + " law has no density");
  }
}

double LawDescriptor::cdf(double x) const {
  switch (family_) {
    case Family::exponential: return x < 0 ? 0 : -std::expm1(-params_[0] * x);
    case Family::beta: return x <= 0 ? 0 : x >= 1 ? 1 : boost::math::ibeta(params_[0], params_[1], x);
    case Family::gamma: return x <= 0 ? 0 : boost::math::gamma_p(params_[0], x / params_[1]);
    case Family::gaussian: return 0.5 * std::erfc(-(x - params_[0]) / (params_[1] * std::numbers::sqrt2));
    case Family::point_mass: return x >= params_[0] ? 1 : 0;
    case Family::geometric:
    case Family::negative_binomial: {
      if (x < 0) return 0;
      double s = 0;
      for (std::int64_t m = 0; m <= static_cast<std::int64_t>(std::floor(x)); ++m) s += pmf(m);
      return std::min(s, 1.0);
    }
    case Family::moment_sequence: break;
  }
  throw Error(ErrorCode::domain_error, "moment-sequence law has no closed-form cdf");
}

double LawDescriptor::moment(unsigned s) const {
  if (s == 0) return 1;
  switch (family_) {
    case Family::exponential: return std::tgamma(s + 1.0) / std::pow(params_[0], s);
    case Family::beta: {
      double out = 1;
      for (unsigned i = 0; i < s; ++i) out *= (params_[0] + i) / (params_[0] + params_[1] + i);
      return out;
    }
    case Family::gamma: return std::pow(params_[1], s) * boost::math::tgamma_ratio(params_[0] + s, params_[0]);
    case Family::gaussian: {
      double prev2 = 1, prev = params_[0];
      for (unsigned i = 2; i <= s; ++i) {
        const double next = params_[0] * prev + (i - 1) * params_[1] * params_[1] * prev2;
        prev2 = prev;
        prev = next;
      }
      return prev;
    }
    case Family::point_mass: return std::pow(params_[0], s);
    case Family::geometric:
    case Family::negative_binomial: return discrete_moment(*this, s);
    case Family::moment_sequence: return moments_(s);
  }
  return 0;
}

LawDescriptor regime_law(int k, Quantity quantity, Region region, RegimeParams params) {
  require(k >= 1, "k must be >= 1");
  const double kk = k;
  const double ratio = kk / (kk + 1);
  if (region == Region::central) require(params.rho > 0 && params.rho < 1, "central region needs 0 < rho < 1");
  if (region == Region::fixed_j) require(params.j >= 1, "fixed region needs j >= 1");
  if (quantity == Quantity::degree) {
    switch (region) {
      case Region::fixed_j: {
        const auto j = params.j;
        return LawDescriptor::moment_sequence([k, j](unsigned s) { return exact::limit_moment_outdegree(k, j, s); });
      }
      case Region::small_j: return LawDescriptor::exponential(1.0);
      case Region::central: return LawDescriptor::geometric(std::pow(params.rho, ratio));
      case Region::large_j: return LawDescriptor::point_mass(0);
    }
  } else {
    switch (region) {
      case Region::fixed_j:
        return LawDescriptor::beta(ratio, static_cast<double>(params.j) - 1 + 2 / (kk + 1));
      case Region::small_j: return LawDescriptor::gamma(ratio, 1.0);
      case Region::central: return LawDescriptor::negative_binomial(ratio, params.rho);
      case Region::large_j: return LawDescriptor::point_mass(1);
    }
  }
  throw Error(ErrorCode::invalid_parameter, "unknown regime");
}

// ---------------------------------------------------------------------------
// Clustering constant

namespace {

double clustering_weight(int k, double d) {
  // 2(k-1)/d - (k-1)(k-2)/(d(d-1))
  return (k - 1.0) * (2 * d - k) / (d * (d - 1));
}

}  // namespace

double clustering_series_term(int k, std::uint64_t m) {
  require(k >= 2, "clustering constant needs k >= 2");
  return exact::limit_random_outdegree_float(k, m) * clustering_weight(k, static_cast<double>(m + k));
}

double clustering_constant(int k, double tol) {
  require(k >= 2, "clustering constant needs k >= 2");
  require(tol > 0, "tolerance must be positive");
  const double a = 1.0 / k;
  double p = (k + 1.0) / (2.0 * k + 1.0);  // p_0
  double tail = 1;                          // P{limit >= m}
  double sum = 0, carry = 0;                // Neumaier summation
  for (std::uint64_t m = 0;; ++m) {
    const double d = static_cast<double>(m + k);
    if (clustering_weight(k, d) * tail <= tol) break;
    const double term = p * clustering_weight(k, d);
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    const double md = static_cast<double>(m);
    tail -= p;
    p *= (md + 1) / (md + 3 + a);
    // Recompute the tail multiplicatively to avoid cancellation once it is small.
    if ((m & 1023) == 1023) tail = exact::limit_random_outdegree_tail(k, m + 1);
  }
  return sum + carry;
}

std::optional<double> clustering_constant_closed_form(int k) {
  using boost::math::trigamma;
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  switch (k) {
    case 2: return 23.0 - 9.0 / 4.0 * pi2;
    case 3: return -5.0 + 16.0 / 3.0 * trigamma(4.0 / 3.0);
    case 4: return 1051.0 / 96.0 - 75.0 / 128.0 * trigamma(1.0 / 4.0);
    case 5: return 512.0 / 125.0 - 72.0 / 625.0 * trigamma(-4.0 / 5.0);
    case 6: return 148003.0 / 57024.0 - 2695.0 / 62208.0 * trigamma(-11.0 / 6.0);
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Distances

DistanceParams distance_params(int k) {
  require(k >= 1, "k must be >= 1");
  DistanceParams p;
  p.k = k;
  p.harmonic = 0;
  p.harmonic2 = 0;
  for (int l = 1; l <= k; ++l) {
    p.harmonic += 1.0 / l;
    p.harmonic2 += 1.0 / (static_cast<double>(l) * l);
  }
  p.mean_coefficient = 1.0 / ((k + 1) * p.harmonic);
  p.variance_coefficient = p.harmonic2 / ((k + 1) * p.harmonic * p.harmonic * p.harmonic);
  return p;
}

// ---------------------------------------------------------------------------
// Characteristic equation

namespace {

using Complex = std::complex<double>;

double char_constant(int k) {
  // k!/(k+1)^k
  double c = 1;
  for (int i = 1; i <= k; ++i) c *= static_cast<double>(i) / (k + 1);
  return c;
}

Complex horner(const std::vector<double>& coeffs, Complex x) {
  Complex acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex horner_derivative(const std::vector<double>& coeffs, Complex x) {
  Complex acc = 0;
  for (std::size_t i = coeffs.size() - 1; i >= 1; --i) acc = acc * x + static_cast<double>(i) * coeffs[i];
  return acc;
}

Complex product_residual(int k, double v, Complex a) {
  Complex prod = 1;
  for (int r = 0; r < k; ++r) prod *= a - static_cast<double>(r) / (k + 1);
  return prod - char_constant(k) * v;
}

std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
  const auto degree = static_cast<Eigen::Index>(coeffs.size() - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1;
  for (Eigen::Index i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::root_tracking, "companion eigenvalue solve failed");
  std::vector<Complex> roots;
  for (Eigen::Index i = 0; i < degree; ++i) {
    Complex z = solver.eigenvalues()[i];
    const Complex dp = horner_derivative(coeffs, z);
    if (std::abs(dp) > 0) z -= horner(coeffs, z) / dp;
    roots.push_back(z);
  }
  return roots;
}

std::size_t nearest(const std::vector<Complex>& roots, Complex target, double& gap_ratio) {
  std::size_t best = 0;
  double d1 = INFINITY, d2 = INFINITY;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double d = std::abs(roots[i] - target);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = i;
    } else if (d < d2) {
      d2 = d;
    }
  }
  gap_ratio = std::isinf(d2) ? 0 : d1 / d2;
  return best;
}

}  // namespace

std::vector<double> char_polynomial(int k, double v) {
  require(k >= 1, "k must be >= 1");
  std::vector<double> coeffs{1.0};
  for (int r = 0; r < k; ++r) {
    const double shift = static_cast<double>(r) / (k + 1);
    std::vector<double> next(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i + 1] += coeffs[i];
      next[i] -= shift * coeffs[i];
    }
    coeffs = std::move(next);
  }
  coeffs[0] -= char_constant(k) * v;
  return coeffs;
}

CharRoots char_roots(int k, double v) {
  require(k >= 1, "k must be >= 1");
  require(std::isfinite(v), "v must be finite");
  CharRoots out;
  out.k = k;
  out.v = v;

  double gap = 0;
  auto roots = polynomial_roots(char_polynomial(k, 1.0));
  Complex tracked = roots[nearest(roots, Complex(static_cast<double>(k) / (k + 1), 0), gap)];

  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(v - 1) / 0.005)));
  for (int s = 1; s <= steps && v != 1; ++s) {
    const double vs = 1 + (v - 1) * s / steps;
    roots = polynomial_roots(char_polynomial(k, vs));
    const auto idx = nearest(roots, tracked, gap);
    if (gap > 0.5)
      throw Error(ErrorCode::root_tracking, "roots too close to continue alpha_1 at v = " + std::to_string(vs));
    tracked = roots[idx];
  }
  if (v == 1) roots = polynomial_roots(char_polynomial(k, 1.0));

  const auto idx = nearest(roots, tracked, gap);
  out.roots.push_back(roots[idx]);
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (i != idx) out.roots.push_back(roots[i]);
  std::sort(out.roots.begin() + 1, out.roots.end(),
            [](Complex a, Complex b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
  for (const auto& r : out.roots) out.max_residual = std::max(out.max_residual, std::abs(product_residual(k, v, r)));
  return out;
}

double alpha1_derivative(int k) {
  const auto roots = char_roots(k, 1.0);
  const auto coeffs = char_polynomial(k, 1.0);
  const Complex dp = horner_derivative(coeffs, roots.roots.front());
  return char_constant(k) / dp.real();
}

}  // namespace ktree::asym
