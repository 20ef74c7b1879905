#include "riskopt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace riskopt {
namespace {

constexpr double kSimplexTol = 1e-9;

double sum_of(std::span<const double> v) {
  // Kahan: tail sums over 10^6 order statistics feed the AVaR equivalence checks.
  double s = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

RiskSpec::RiskSpec(std::vector<double> weights, std::vector<double> levels)
    : weights_(std::move(weights)), levels_(std::move(levels)) {
  if (weights_.size() != levels_.size() + 1) {
    throw std::invalid_argument("RiskSpec: need k+1 weights for k levels");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("RiskSpec: weights must be finite and >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kSimplexTol) {
    throw std::invalid_argument("RiskSpec: weights must sum to 1, got " +
                                std::to_string(total));
  }
  double prev = 0.0;
  for (double a : levels_) {
    if (!(a > prev) || !(a < 1.0)) {
      throw std::invalid_argument(
          "RiskSpec: levels must satisfy 0 < a1 < ... < ak < 1");
    }
    prev = a;
  }
}

RiskSpec RiskSpec::expectation() { return RiskSpec({1.0}, {}); }

RiskSpec RiskSpec::mean_avar(double w0, double w1, double alpha) {
  return RiskSpec({w0, w1}, {alpha});
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sample)
    : values_(std::move(sample)) {
  if (values_.empty()) {
    throw std::invalid_argument("EmpiricalDistribution: empty sample");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("EmpiricalDistribution: non-finite value");
    }
  }
  std::sort(values_.begin(), values_.end());
  mean_ = sum_of(values_) / static_cast<double>(values_.size());
}

std::size_t left_quantile_rank(double alpha, std::size_t n) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw std::domain_error("quantile level must lie in (0, 1]");
  }
  const double an = alpha * static_cast<double>(n);
  const double nearest = std::round(an);
  double m = std::ceil(an);
  if (std::abs(an - nearest) <= 1e-12 * std::max(1.0, an)) m = nearest;
  return std::clamp<std::size_t>(static_cast<std::size_t>(m), 1, n);
}

double empirical_quantile(const EmpiricalDistribution& dist, double alpha) {
  return dist.values()[left_quantile_rank(alpha, dist.size()) - 1];
}

Interval quantile_interval(const EmpiricalDistribution& dist, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("quantile interval needs 0 < alpha < 1");
  }
  const auto z = dist.values();
  const std::size_t n = z.size();
  const std::size_t m = left_quantile_rank(alpha, n);
  // Right quantile sup{t : F(t-) <= alpha} is Z_(m+1) exactly when alpha N == m.
  const bool on_step = std::abs(alpha * static_cast<double>(n) -
                                static_cast<double>(m)) <=
                       1e-12 * std::max(1.0, alpha * static_cast<double>(n));
  const std::size_t right = (on_step && m < n) ? m + 1 : m;
  return {z[m - 1], z[right - 1]};
}

double avar(const EmpiricalDistribution& dist, double alpha) {
  if (!(alpha >= 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("AVaR level must lie in [0, 1)");
  }
  if (alpha == 0.0) return dist.mean();
  const auto z = dist.values();
  const double n = static_cast<double>(z.size());
  const std::size_t m = left_quantile_rank(alpha, z.size());
  const double straddle = std::max(0.0, static_cast<double>(m) / n - alpha);
  const double tail = sum_of(z.subspan(m)) / n;
  return (z[m - 1] * straddle + tail) / (1.0 - alpha);
}

VariationalAvar avar_variational(const EmpiricalDistribution& dist,
                                 double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("AVaR variational form needs 0 < alpha < 1");
  }
  const auto z = dist.values();
  const std::size_t n = z.size();
  const double scale = 1.0 / ((1.0 - alpha) * static_cast<double>(n));

  // suffix[i] = sum_{j >= i} z[j]
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + z[i];

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = z[i];
    const double excess =
        (suffix[i + 1] - static_cast<double>(n - i - 1) * t) * scale;
    best = std::min(best, t + excess);
  }
  return {best, quantile_interval(dist, alpha)};
}

double phi(double z, const RiskSpec& spec, std::span<const double> tau) {
  if (tau.size() != spec.k()) {
    throw std::invalid_argument("phi: tau length must equal spec.k()");
  }
  double v = spec.w0() * z;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    v += spec.avar_weight(i) *
         (tau[i] + std::max(0.0, z - tau[i]) / (1.0 - spec.level(i)));
  }
  return v;
}

double phi_slope(double z, const RiskSpec& spec, std::span<const double> tau) {
  if (tau.size() != spec.k()) {
    throw std::invalid_argument("phi_slope: tau length must equal spec.k()");
  }
  double s = spec.w0();
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (z >= tau[i]) s += spec.avar_weight(i) / (1.0 - spec.level(i));
  }
  return s;
}

double risk_plugin(const EmpiricalDistribution& dist, const RiskSpec& spec) {
  double v = spec.w0() * dist.mean();
  for (std::size_t i = 0; i < spec.k(); ++i) {
    if (spec.avar_weight(i) != 0.0) {
      v += spec.avar_weight(i) * avar(dist, spec.level(i));
    }
  }
  return v;
}

double risk_plugin_max(const EmpiricalDistribution& dist,
                       std::span<const RiskSpec> rows) {
  if (rows.empty()) {
    throw std::invalid_argument("risk_plugin_max: empty uncertainty set");
  }
  const auto levels = rows.front().levels();
  double best = -std::numeric_limits<double>::infinity();
  for (const RiskSpec& row : rows) {
    if (!std::equal(levels.begin(), levels.end(), row.levels().begin(),
                    row.levels().end())) {
      throw std::invalid_argument("risk_plugin_max: rows must share levels");
    }
    best = std::max(best, risk_plugin(dist, row));
  }
  return best;
}

}  // namespace riskopt
