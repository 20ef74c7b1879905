// Scalar statistical primitives used by the samplers, the confidence
// intervals and the tests.
#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace riskopt {

double normal_pdf(double x);
double normal_cdf(double x);
/// 1 - normal_cdf(x), accurate in the upper tail.
double normal_sf(double x);
/// Inverse of normal_cdf. Throws std::domain_error unless 0 < p < 1.
double normal_quantile(double p);

/// Fisher-Snedecor F(d1, d2) distribution via the regularized incomplete beta.
double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);
/// x with f_cdf(x) = p, found by bisection. Throws std::domain_error on bad input.
double f_quantile(double p, double d1, double d2);

/// Upper tail of chi-square with `dof` degrees of freedom.
double chi2_sf(double x, double dof);

struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased, divisor n - 1
  double skewness = 0.0;  ///< m3 / m2^{3/2} with population moments
  double kurtosis = 0.0;  ///< m4 / m2^2 (normal = 3)
  bool degenerate = false;
};

/// Moments of a sample; degenerate is set when the sample is constant (then
/// skewness and kurtosis are left at zero).
MomentSummary summarize(std::span<const double> sample);

/// Unbiased sample standard deviation. Throws std::invalid_argument for n < 2.
double sample_sd(std::span<const double> sample);

struct JarqueBera {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// JB = n/6 (S^2 + (K - 3)^2 / 4) with the asymptotic chi-square(2) p-value.
/// Throws std::invalid_argument when n < 8 or the sample is constant.
JarqueBera jarque_bera(std::span<const double> sample);

/// Var([Z - tau]_+) written as
///   int int_{[tau, upper]^2} F(min(x, y)) - F(x) F(y) dx dy
/// and evaluated with the trapezoidal rule on a `steps` x `steps` grid.
/// Throws std::invalid_argument when the sampled cdf decreases on the grid.
double cov_pospart_oracle(const std::function<double(double)>& cdf, double tau,
                          double upper, std::size_t steps);

}  // namespace riskopt
