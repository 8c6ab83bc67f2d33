#include "galaxy/gaussian_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "galaxy/errors.hpp"

namespace galaxy::stats {

double default_eps(std::size_t n) {
  if (n < 1) throw InvalidParameter("dimension must be >= 1");
  const double dn = static_cast<double>(n);
  return std::log2(dn) / std::sqrt(dn);
}

ShellSpec ShellSpec::with_default_eps(std::size_t n, double sigma) {
  ShellSpec s{n, sigma, default_eps(n)};
  s.validate();
  return s;
}

void ShellSpec::validate() const {
  if (n < 1) throw InvalidParameter("shell: n must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("shell: sigma must be > 0");
  if (!(eps_n > 0.0) || !std::isfinite(eps_n)) throw InvalidParameter("shell: eps_n must be > 0");
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("quantile: p must lie in (0, 1)");
  // Acklam's rational approximation, then two Newton steps against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const double err = std_normal_cdf(x) - p;
    x -= err / std_normal_pdf(x);
  }
  return x;
}

double projection_tail(double x) {
  if (!(x >= 0.0)) throw InvalidParameter("projection_tail: x must be >= 0");
  return std::erfc(x / std::numbers::sqrt2);
}

namespace {

constexpr int kMaxIter = 100000;
constexpr double kEps = 1e-16;

// log(x^a e^{-x} / Gamma(a))
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// P(a, x) by its power series; converges quickly for x < a + 1.
double p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

// Q(a, x) by the modified Lentz continued fraction; valid for x >= a + 1.
double q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double bcoef = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / bcoef;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    bcoef += 2.0;
    d = an * d + bcoef;
    if (std::abs(d) < tiny) d = tiny;
    c = bcoef + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw InvalidParameter("incomplete gamma: a must be > 0");
  if (!(x >= 0.0) || std::isnan(x)) throw InvalidParameter("incomplete gamma: x must be >= 0");
}

}  // namespace

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return p_series(a, x);
  return 1.0 - q_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - p_series(a, x);
  return q_continued_fraction(a, x);
}

double chi_square_cdf(std::size_t n, double x) {
  if (n < 1) throw InvalidParameter("chi-square: degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw InvalidParameter("chi-square: x must be >= 0");
  return gamma_p(0.5 * static_cast<double>(n), 0.5 * x);
}

double chi_square_sf(std::size_t n, double x) {
  if (n < 1) throw InvalidParameter("chi-square: degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw InvalidParameter("chi-square: x must be >= 0");
  return gamma_q(0.5 * static_cast<double>(n), 0.5 * x);
}

double shell_z(const ShellSpec& spec) {
  return std::sqrt(static_cast<double>(spec.n)) * spec.eps_n /
         (std::numbers::sqrt2 * spec.sigma * spec.sigma);
}

double shell_prob_same(const ShellSpec& spec, ShellMethod method) {
  spec.validate();
  if (method == ShellMethod::NormalApprox) return 1.0 - 2.0 * std_normal_cdf(-shell_z(spec));
  const double n = static_cast<double>(spec.n);
  const double half = n * spec.eps_n / (spec.sigma * spec.sigma);
  const double lo = std::max(0.0, n - half);
  const double hi = n + half;
  // 1 - Q(hi) - P(lo) keeps both tails at full relative precision.
  const double below = lo > 0.0 ? chi_square_cdf(spec.n, lo) : 0.0;
  const double above = chi_square_sf(spec.n, hi);
  return std::max(0.0, 1.0 - above - below);
}

double shell_prob_cross(const ShellSpec& spec, double d) {
  spec.validate();
  if (!(d >= 0.0)) throw InvalidParameter("shell_prob_cross: d must be >= 0");
  const double n = static_cast<double>(spec.n);
  const double s2 = spec.sigma * spec.sigma;
  const double num = n * spec.eps_n - d * d;
  const double den = spec.sigma * std::sqrt(2.0 * n * s2 + 4.0 * d * d);
  return std_normal_cdf(num / den);
}

double mills_bound(const ShellSpec& spec) {
  spec.validate();
  const double n = static_cast<double>(spec.n);
  const double s2 = spec.sigma * spec.sigma;
  const double root_n_eps = std::sqrt(n) * spec.eps_n;
  return (2.0 * s2 / (std::sqrt(n * std::numbers::pi) * spec.eps_n)) *
         std::exp(-root_n_eps * root_n_eps / (4.0 * s2 * s2));
}

}  // namespace galaxy::stats
