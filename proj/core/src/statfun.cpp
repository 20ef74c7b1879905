#include "riskopt/statfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace riskopt {
namespace {

// Acklam's rational approximation of the lower-tail normal quantile,
// relative error about 1.15e-9 before refinement.
double acklam_lower(double p) {
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
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void check_dof(double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw std::domain_error("F distribution needs positive degrees of freedom");
  }
}

}  // namespace

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = acklam_lower(p);
  // Newton on the lower tail, where erfc keeps full relative accuracy.
  for (int i = 0; i < 2; ++i) {
    const double dens = normal_pdf(x);
    if (dens <= 0.0) break;
    x -= (normal_cdf(x) - p) / dens;
  }
  return x;
}

double f_cdf(double x, double d1, double d2) {
  check_dof(d1, d2);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double y = d1 * x / (d1 * x + d2);
  return boost::math::ibeta(d1 / 2.0, d2 / 2.0, y);
}

double f_sf(double x, double d1, double d2) {
  check_dof(d1, d2);
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double y = d1 * x / (d1 * x + d2);
  return boost::math::ibetac(d1 / 2.0, d2 / 2.0, y);
}

double f_quantile(double p, double d1, double d2) {
  check_dof(d1, d2);
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("f_quantile: p must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("f_quantile: no bracket");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f_cdf(mid, d1, d2) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double chi2_sf(double x, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("chi2_sf: dof must be positive");
  if (x <= 0.0) return 1.0;
  if (dof == 2.0) return std::exp(-0.5 * x);
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

MomentSummary summarize(std::span<const double> sample) {
  MomentSummary out;
  out.n = sample.size();
  if (sample.empty()) {
    out.degenerate = true;
    return out;
  }
  const double n = static_cast<double>(sample.size());
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sample) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  out.mean = mean;
  out.variance = sample.size() > 1 ? m2 / (n - 1.0) : 0.0;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  // Relative threshold: a constant sample leaves only rounding noise in m2.
  if (!(m2 > 1e-28 * std::max(1.0, mean * mean))) {
    out.degenerate = true;
    out.variance = 0.0;
    return out;
  }
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  return out;
}

double sample_sd(std::span<const double> sample) {
  if (sample.size() < 2) {
    throw std::invalid_argument("sample_sd: need at least two observations");
  }
  return std::sqrt(summarize(sample).variance);
}

JarqueBera jarque_bera(std::span<const double> sample) {
  if (sample.size() < 8) {
    throw std::invalid_argument("jarque_bera: need at least 8 observations");
  }
  const MomentSummary m = summarize(sample);
  if (m.degenerate) {
    throw std::invalid_argument("jarque_bera: constant sample");
  }
  const double n = static_cast<double>(m.n);
  const double excess = m.kurtosis - 3.0;
  JarqueBera jb;
  jb.statistic = n / 6.0 * (m.skewness * m.skewness + 0.25 * excess * excess);
  jb.p_value = chi2_sf(jb.statistic, 2.0);
  return jb;
}

double cov_pospart_oracle(const std::function<double(double)>& cdf, double tau,
                          double upper, std::size_t steps) {
  if (!(upper > tau)) return 0.0;
  if (steps < 1) throw std::invalid_argument("cov_pospart_oracle: steps >= 1");
  const double h = (upper - tau) / static_cast<double>(steps);
  std::vector<double> f(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    f[i] = cdf(tau + h * static_cast<double>(i));
    if (i > 0 && f[i] < f[i - 1] - 1e-12) {
      throw std::invalid_argument("cov_pospart_oracle: cdf is not monotone");
    }
  }
  auto weight = [&](std::size_t i) {
    return (i == 0 || i == steps) ? 0.5 : 1.0;
  };
  // sum_ij w_i w_j F(min) = sum_i w_i F_i (w_i + 2 sum_{j>i} w_j)
  double cross = 0.0;
  double linear = 0.0;
  double tail_weight = 0.0;
  for (std::size_t i = steps + 1; i-- > 0;) {
    const double wi = weight(i);
    cross += wi * f[i] * (wi + 2.0 * tail_weight);
    linear += wi * f[i];
    tail_weight += wi;
  }
  return h * h * (cross - linear * linear);
}

}  // namespace riskopt
