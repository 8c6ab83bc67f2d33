#pragma once

#include <cstddef>

namespace galaxy::stats {

// Shell parameters: dimension, noise std and the half-width eps_n (in units
// of sigma^2). eps_n defaults to n^{-1/2} log2 n.
struct ShellSpec {
  std::size_t n = 1;
  double sigma = 1.0;
  double eps_n = 0.0;

  static ShellSpec with_default_eps(std::size_t n, double sigma);
  void validate() const;
};

double default_eps(std::size_t n);

double std_normal_pdf(double z);

// Phi(x). Uses erfc on both sides so tails keep relative accuracy.
double std_normal_cdf(double x);

// Phi^{-1}(p) for p in (0, 1); Newton-polished rational start.
double std_normal_quantile(double p);

// P(||Proj_u(Z)|| >= x) = 2 Phi(-x) for standard normal Z in any dimension.
double projection_tail(double x);

// Regularized incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// chi^2(n) CDF and survival function.
double chi_square_cdf(std::size_t n, double x);
double chi_square_sf(std::size_t n, double x);

enum class ShellMethod { NormalApprox, Exact };

// Probability that the output of the transmitted codeword lands in its own
// shell: NormalApprox is the normal approximation 1 - 2 Phi(-sqrt(n) eps /
// (sqrt(2) sigma^2)); Exact integrates chi^2(n) over [n - n eps / sigma^2,
// n + n eps / sigma^2].
double shell_prob_same(const ShellSpec& spec, ShellMethod method);

// Normal approximation of the probability that the output of a codeword at
// distance d lands in another codeword's shell.
double shell_prob_cross(const ShellSpec& spec, double d);

// (2 sigma^2 / (sqrt(n pi) eps)) exp(-n eps^2 / (4 sigma^4)), an upper bound on
// Phi(-sqrt(n) eps / (sqrt(2) sigma^2)).
double mills_bound(const ShellSpec& spec);

// The argument sqrt(n) eps / (sqrt(2) sigma^2) shared by the last three.
double shell_z(const ShellSpec& spec);

}  // namespace galaxy::stats
