#include "ktree/exact.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "ktree/error.hpp"

namespace ktree::exact {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::domain_error, what);
}

BigInt big(std::uint64_t v) { return BigInt(static_cast<unsigned long>(v)); }
BigInt big(std::int64_t v) { return BigInt(static_cast<long>(v)); }

BigInt factorial(std::uint64_t n) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

BigInt power(std::uint64_t base, std::uint64_t e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

Rational make(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Rows of the alternating sum sum_l C(m,l)(-1)^l terms[l], for m = 0..M.
std::vector<BigInt> binomial_transform(const std::vector<BigInt>& terms) {
  std::vector<BigInt> out(terms.size());
  std::vector<BigInt> row{BigInt(1)};  // C(m, l)
  for (std::size_t m = 0; m < terms.size(); ++m) {
    BigInt sum = 0;
    for (std::size_t l = 0; l <= m; ++l) {
      if (l % 2 == 0)
        sum += row[l] * terms[l];
      else
        sum -= row[l] * terms[l];
    }
    out[m] = sum;
    std::vector<BigInt> next(row.size() + 1);
    next[0] = 1;
    next[row.size()] = 1;
    for (std::size_t l = 1; l < row.size(); ++l) next[l] = row[l - 1] + row[l];
    row = std::move(next);
  }
  return out;
}

double signed_lgamma_exp(double log_mag, int sign) { return sign * std::exp(log_mag); }

}  // namespace

double to_double(const Rational& q) { return q.get_d(); }

BigInt progression_product(const BigInt& first, const BigInt& step, std::uint64_t count) {
  if (count == 0) return BigInt(1);
  if (count <= 16) {
    BigInt out = first;
    BigInt term = first;
    for (std::uint64_t i = 1; i < count; ++i) {
      term += step;
      out *= term;
    }
    return out;
  }
  const std::uint64_t half = count / 2;
  return progression_product(first, step, half) * progression_product(first + step * big(half), step, count - half);
}

Rational gbin(const Rational& x, long n) {
  require(n >= 0, "generalized binomial needs n >= 0, got " + std::to_string(n));
  // x = p/q: prod_{i<n} (p - i q) / (q^n n!)
  const BigInt p = x.get_num();
  const BigInt q = x.get_den();
  const auto count = static_cast<std::uint64_t>(n);
  const BigInt num = progression_product(p, -q, count);
  BigInt qn;
  mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), count);
  return make(num, qn * factorial(count));
}

double gbin_float(double x, long n) {
  require(n >= 0, "generalized binomial needs n >= 0, got " + std::to_string(n));
  if (n == 0) return 1.0;
  const double nn = static_cast<double>(n);
  if (x == std::floor(x)) {
    if (x >= 0.0) {
      if (x < nn) return 0.0;
    } else {
      // binom(x, n) = (-1)^n binom(n - x - 1, n)
      const double mag = gbin_float(nn - x - 1.0, n);
      return (n % 2 == 0) ? mag : -mag;
    }
  }
  if (n <= 24) {
    double out = 1.0;
    for (long i = 0; i < n; ++i) out *= (x - static_cast<double>(i)) / static_cast<double>(i + 1);
    return out;
  }
  int s1 = 1, s2 = 1;
  const double a = boost::math::lgamma(x + 1.0, &s1);
  const double b = boost::math::lgamma(x - nn + 1.0, &s2);
  return signed_lgamma_exp(a - std::lgamma(nn + 1.0) - b, s1 * s2);
}

BigInt count_trees(int k, std::uint64_t n) {
  require(k >= 1, "k must be >= 1");
  return progression_product(BigInt(1), big(static_cast<std::uint64_t>(k + 1)), n);
}

BigInt count_trees_binomial(int k, std::uint64_t n) {
  require(k >= 1, "k must be >= 1");
  const Rational x = Rational(static_cast<long>(n)) - Rational(k, k + 1);
  const Rational v = Rational(factorial(n) * power(static_cast<std::uint64_t>(k + 1), n)) *
                     gbin(x, static_cast<long>(n));
  require(v.get_den() == 1, "binomial form of T_n is not an integer");
  return v.get_num();
}

BigInt count_S(int k, std::uint64_t n) {
  require(k >= 1, "k must be >= 1");
  require(n >= 1, "S_n is defined for n >= 1");
  const Rational x = Rational(static_cast<long>(n - 1)) - Rational(1, k + 1);
  const Rational v = Rational(factorial(n - 1) * power(static_cast<std::uint64_t>(k + 1), n - 1)) *
                     gbin(x, static_cast<long>(n - 1));
  require(v.get_den() == 1, "S_n is not an integer");
  return v.get_num();
}

// ---------------------------------------------------------------------------
// Out-degree of node j.
//
// With D_x = (k+1)^x x!, binom(j - k/(k+1), j) = T_j / D_j and
// binom(n - k(2+l)/(k+1), n-j) = N_l / D_{n-j}, N_l = prod_{i<n-j} ((k+1)(n-i) - k(2+l)).
// The prefactor's D's cancel against binom(n, j), leaving
//   P{Y = m} = T_j / T_n * sum_l C(m,l)(-1)^l N_l.

std::vector<Rational> outdegree_pmf_table(int k, std::uint64_t n, std::uint64_t j, std::uint64_t max_m) {
  require(k >= 1, "k must be >= 1");
  require(j >= 1 && j <= n, "out-degree pmf needs n >= j >= 1");
  const std::uint64_t top = std::min(max_m, n - j);
  const auto kk = static_cast<std::int64_t>(k);
  std::vector<BigInt> terms;
  terms.reserve(top + 1);
  for (std::uint64_t l = 0; l <= top; ++l) {
    // Factors (k+1)(n-i) - k(2+l) for i = n-j-1 down to 0, increasing by k+1.
    const std::int64_t smallest = (kk + 1) * static_cast<std::int64_t>(j + 1) - kk * (2 + static_cast<std::int64_t>(l));
    terms.push_back(progression_product(big(smallest), big(kk + 1), n - j));
  }
  const auto sums = binomial_transform(terms);
  const BigInt tj = count_trees(k, j);
  const BigInt tn = count_trees(k, n);
  std::vector<Rational> out;
  out.reserve(sums.size());
  for (const auto& s : sums) out.push_back(make(tj * s, tn));
  return out;
}

Rational pmf_outdegree(int k, std::uint64_t n, std::uint64_t j, std::uint64_t m) {
  require(j >= 1 && j <= n, "out-degree pmf needs n >= j >= 1");
  if (m > n - j) return Rational(0);
  return outdegree_pmf_table(k, n, j, m).back();
}

// ---------------------------------------------------------------------------
// Root out-degree:
//   P = binom(m - (k-1)/k, m) / T_n * sum_l C(m,l)(-1)^l R_l,
//   R_l = prod_{t<n} ((k+1)t - k l)   (= D_n binom(n-1-kl/(k+1), n)).

std::vector<Rational> root_outdegree_pmf_table(int k, std::uint64_t n, std::uint64_t max_m) {
  require(k >= 1, "k must be >= 1");
  const std::uint64_t top = std::min(max_m, n);
  const auto kk = static_cast<std::int64_t>(k);
  std::vector<BigInt> terms;
  for (std::uint64_t l = 0; l <= top; ++l)
    terms.push_back(progression_product(big(-kk * static_cast<std::int64_t>(l)), big(kk + 1), n));
  const auto sums = binomial_transform(terms);
  const BigInt tn = count_trees(k, n);
  std::vector<Rational> out;
  for (std::uint64_t m = 0; m <= top; ++m) {
    const Rational lead = gbin(Rational(static_cast<long>(m)) - Rational(k - 1, k), static_cast<long>(m));
    out.push_back(lead * make(sums[m], tn));
  }
  return out;
}

Rational pmf_root_outdegree(int k, std::uint64_t n, std::uint64_t m) {
  if (m > n) return Rational(0);
  return root_outdegree_pmf_table(k, n, m).back();
}

// ---------------------------------------------------------------------------
// Random inserted node:
//   P = 1/(n T_n) sum_l C(m,l)(-1)^l (P+ - P_l) / (k(l+2)+1),
//   P+ = prod_{i<n} ((k+1)(n-i) + 1), P_l = prod_{i<n} ((k+1)(n-i) - k(l+2)).

std::vector<Rational> random_outdegree_pmf_table(int k, std::uint64_t n, std::uint64_t max_m) {
  require(k >= 1, "k must be >= 1");
  require(n >= 1, "random out-degree pmf needs n >= 1");
  const std::uint64_t top = std::min(max_m, n - 1);
  const auto kk = static_cast<std::int64_t>(k);
  const BigInt plus = progression_product(big(kk + 2), big(kk + 1), n);
  const BigInt ntn = big(n) * count_trees(k, n);
  std::vector<Rational> terms;
  for (std::uint64_t l = 0; l <= top; ++l) {
    const std::int64_t shift = kk * (static_cast<std::int64_t>(l) + 2);
    const BigInt pl = progression_product(big(kk + 1 - shift), big(kk + 1), n);
    terms.push_back(make(plus - pl, big(shift + 1) * ntn));
  }
  std::vector<Rational> out;
  std::vector<BigInt> row{BigInt(1)};
  for (std::uint64_t m = 0; m <= top; ++m) {
    Rational sum = 0;
    for (std::uint64_t l = 0; l <= m; ++l) {
      const Rational t = Rational(row[l]) * terms[l];
      if (l % 2 == 0)
        sum += t;
      else
        sum -= t;
    }
    out.push_back(sum);
    std::vector<BigInt> next(row.size() + 1);
    next[0] = 1;
    next[row.size()] = 1;
    for (std::size_t l = 1; l < row.size(); ++l) next[l] = row[l - 1] + row[l];
    row = std::move(next);
  }
  return out;
}

Rational pmf_random_outdegree(int k, std::uint64_t n, std::uint64_t m) {
  require(n >= 1, "random out-degree pmf needs n >= 1");
  if (m > n - 1) return Rational(0);
  return random_outdegree_pmf_table(k, n, m).back();
}

Rational limit_random_outdegree(int k, std::uint64_t m) {
  require(k >= 1, "k must be >= 1");
  const Rational x = Rational(static_cast<long>(m + 2)) + Rational(1, k);
  const Rational den = Rational(k) * Rational(static_cast<long>(m + 1)) * gbin(x, static_cast<long>(m + 1));
  return Rational(k + 1) / den;
}

double limit_random_outdegree_float(int k, std::uint64_t m) {
  require(k >= 1, "k must be >= 1");
  // ((k+1)/k) Gamma(2+1/k) Gamma(m+1) / Gamma(m+3+1/k)
  const double a = 1.0 / k;
  const double md = static_cast<double>(m);
  return (k + 1.0) / k * std::tgamma(2.0 + a) * boost::math::tgamma_ratio(md + 1.0, md + 3.0 + a);
}

double limit_random_outdegree_tail(int k, std::uint64_t m) {
  require(k >= 1, "k must be >= 1");
  const double a = 1.0 / k;
  const double md = static_cast<double>(m);
  return std::tgamma(2.0 + a) * boost::math::tgamma_ratio(md + 1.0, md + 2.0 + a);
}

// ---------------------------------------------------------------------------
// Descendants of node j.

Rational pmf_descendants(int k, std::uint64_t n, std::uint64_t j, std::uint64_t m) {
  require(k >= 1, "k must be >= 1");
  require(j >= 1 && j <= n, "descendant pmf needs n >= j >= 1");
  if (m < 1 || m > n - j + 1) return Rational(0);
  const Rational c1(1, k + 1);
  const Rational c2(2, k + 1);
  const Rational ck(k, k + 1);
  const auto ml = static_cast<long>(m);
  const auto nl = static_cast<long>(n);
  const auto jl = static_cast<long>(j);
  const Rational a = gbin(Rational(ml - 1) - c1, ml - 1);
  const Rational b = gbin(Rational(nl - ml - 1) + c2, nl - ml - jl + 1);
  const Rational d = gbin(Rational(nl) - ck, nl - jl);
  return a * b / d;
}

double pmf_descendants_float(int k, std::uint64_t n, std::uint64_t j, std::uint64_t m) {
  require(k >= 1, "k must be >= 1");
  require(j >= 1 && j <= n, "descendant pmf needs n >= j >= 1");
  if (m < 1 || m > n - j + 1) return 0.0;
  const double c1 = 1.0 / (k + 1), c2 = 2.0 / (k + 1), ck = static_cast<double>(k) / (k + 1);
  const auto ml = static_cast<long>(m);
  const auto nl = static_cast<long>(n);
  const auto jl = static_cast<long>(j);
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  const double a = gbin_float(md - 1.0 - c1, ml - 1);
  const double b = gbin_float(nd - md - 1.0 + c2, nl - ml - jl + 1);
  const double d = gbin_float(nd - ck, nl - jl);
  if (std::isfinite(a) && std::isfinite(b) && std::isfinite(d) && d != 0.0 && std::abs(a) < 1e300 &&
      std::abs(b) < 1e300 && std::abs(d) > 1e-300)
    return a * b / d;
  // Large arguments: combine in log space.
  auto log_abs = [](double x, long r, int& sign) {
    const double rd = static_cast<double>(r);
    int s1 = 1, s2 = 1;
    const double v = boost::math::lgamma(x + 1.0, &s1) - std::lgamma(rd + 1.0) - boost::math::lgamma(x - rd + 1.0, &s2);
    sign = s1 * s2;
    return v;
  };
  int sa = 1, sb = 1, sd = 1;
  const double la = log_abs(md - 1.0 - c1, ml - 1, sa);
  const double lb = log_abs(nd - md - 1.0 + c2, nl - ml - jl + 1, sb);
  const double ld = log_abs(nd - ck, nl - jl, sd);
  return sa * sb * sd * std::exp(la + lb - ld);
}

std::vector<double> descendants_pmf_float_table(int k, std::uint64_t n, std::uint64_t j) {
  std::vector<double> out;
  out.reserve(n - j + 1);
  for (std::uint64_t m = 1; m <= n - j + 1; ++m) out.push_back(pmf_descendants_float(k, n, j, m));
  return out;
}

// ---------------------------------------------------------------------------
// Descendants of a random inserted node:
//   P = binom(m-1-1/(k+1), m-1) / (n T_n) sum_l C(m-1,l)(-1)^l (P+ - Q_l) / ((k+1)(l+1)+k),
//   Q_l = prod_{i<n} ((k+1)(n-l-2-i) + 2)   (= D_n binom(n-l-2+2/(k+1), n)).

std::vector<Rational> random_descendants_pmf_table(int k, std::uint64_t n, std::uint64_t max_m) {
  require(k >= 1, "k must be >= 1");
  require(n >= 1, "random descendant pmf needs n >= 1");
  const std::uint64_t top = std::min(max_m, n);
  const auto kk = static_cast<std::int64_t>(k);
  const auto nn = static_cast<std::int64_t>(n);
  const BigInt plus = progression_product(big(kk + 2), big(kk + 1), n);
  const BigInt ntn = big(n) * count_trees(k, n);
  std::vector<Rational> terms;  // index l = 0..top-1
  for (std::uint64_t l = 0; l + 1 <= top; ++l) {
    const auto ll = static_cast<std::int64_t>(l);
    // Factors for i = n-1 down to 0: (k+1)(1-l-2) + 2 upward by k+1.
    const BigInt ql = progression_product(big((kk + 1) * (nn - ll - 2 - (nn - 1)) + 2), big(kk + 1), n);
    terms.push_back(make(plus - ql, big((kk + 1) * (ll + 1) + kk) * ntn));
  }
  std::vector<Rational> out;
  std::vector<BigInt> row{BigInt(1)};  // C(m-1, l)
  for (std::uint64_t m = 1; m <= top; ++m) {
    Rational sum = 0;
    for (std::uint64_t l = 0; l + 1 <= m; ++l) {
      const Rational t = Rational(row[l]) * terms[l];
      if (l % 2 == 0)
        sum += t;
      else
        sum -= t;
    }
    const auto ml = static_cast<long>(m);
    out.push_back(gbin(Rational(ml - 1) - Rational(1, k + 1), ml - 1) * sum);
    std::vector<BigInt> next(row.size() + 1);
    next[0] = 1;
    next[row.size()] = 1;
    for (std::size_t l = 1; l < row.size(); ++l) next[l] = row[l - 1] + row[l];
    row = std::move(next);
  }
  return out;
}

Rational pmf_random_descendants(int k, std::uint64_t n, std::uint64_t m) {
  require(n >= 1, "random descendant pmf needs n >= 1");
  if (m < 1 || m > n) return Rational(0);
  return random_descendants_pmf_table(k, n, m).back();
}

Rational limit_random_descendants(int k, std::uint64_t m) {
  require(k >= 1, "k must be >= 1");
  require(m >= 1, "descendant counts start at 1");
  const Rational ml(static_cast<long>(m));
  return Rational(k) / (Rational(k + 1) * (ml + Rational(k, k + 1)) * (ml - Rational(1, k + 1)));
}

// ---------------------------------------------------------------------------
// Limit moments

double limit_moment_outdegree(int k, std::uint64_t j, unsigned s) {
  require(k >= 1 && j >= 1, "needs k >= 1 and j >= 1");
  const double kk = k, jd = static_cast<double>(j);
  const double a = jd + 1.0 / (kk + 1.0);
  const double b = jd + 1.0 + kk * (static_cast<double>(s) - 1.0) / (kk + 1.0);
  return std::tgamma(s + 1.0) * boost::math::tgamma_ratio(a, b);
}

double limit_moment_root_outdegree(int k, unsigned s) {
  require(k >= 1, "k must be >= 1");
  const double kk = k;
  return boost::math::tgamma_ratio(1.0 / (kk + 1.0), 1.0 / kk) *
         boost::math::tgamma_ratio(s + 1.0 / kk, kk * s / (kk + 1.0) + 1.0 / (kk + 1.0));
}

double limit_moment_descendants(int k, std::uint64_t j, unsigned s) {
  require(k >= 1 && j >= 1, "needs k >= 1 and j >= 1");
  const double kk = k;
  return gbin_float(s - 1.0 / (kk + 1.0), s) / gbin_float(s + static_cast<double>(j) - kk / (kk + 1.0), s);
}

double limit_moment_descendants_small_j(int k, unsigned s) {
  require(k >= 1, "k must be >= 1");
  return std::tgamma(s + 1.0) * gbin_float(s - 1.0 / (k + 1.0), s);
}

}  // namespace ktree::exact
