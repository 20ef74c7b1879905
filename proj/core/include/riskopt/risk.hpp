// Law-invariant coherent risk measures with a finite Kusuoka support:
//
//   R(Z) = w0 E[Z] + sum_i w_i AVaR_{alpha_i}(Z),   w on the simplex,
//
// together with exact empirical (plug-in) evaluation on a sample.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace riskopt {

/// Weights (w0, w1, ..., wk) on the simplex and strictly increasing levels
/// 0 < alpha_1 < ... < alpha_k < 1. k == 0 is the plain expectation.
class RiskSpec {
 public:
  /// Throws std::invalid_argument when the invariants do not hold.
  RiskSpec(std::vector<double> weights, std::vector<double> levels);

  static RiskSpec expectation();
  /// w0 E + w1 AVaR_alpha, the two-term family used throughout the experiments.
  static RiskSpec mean_avar(double w0, double w1, double alpha);

  std::size_t k() const { return levels_.size(); }
  double w0() const { return weights_.front(); }
  /// Weight on AVaR_{alpha_i}, i in [0, k).
  double avar_weight(std::size_t i) const { return weights_[i + 1]; }
  double level(std::size_t i) const { return levels_[i]; }

  std::span<const double> weights() const { return weights_; }
  std::span<const double> levels() const { return levels_; }

  bool operator==(const RiskSpec&) const = default;

 private:
  std::vector<double> weights_;
  std::vector<double> levels_;
};

/// Order statistics Z_(1) <= ... <= Z_(N) of a sample; the step cdf puts mass
/// 1/N on each stored value. Ties are kept.
class EmpiricalDistribution {
 public:
  /// Sorts the sample. Throws std::invalid_argument on an empty sample or a
  /// non-finite value.
  explicit EmpiricalDistribution(std::vector<double> sample);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double mean() const { return mean_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

 private:
  std::vector<double> values_;
  double mean_ = 0.0;
};

/// Closed interval [low, high].
struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Index m = ceil(alpha * n) of the left alpha-quantile, snapped to the nearest
/// integer when alpha * n is within rounding of one. Requires 0 < alpha <= 1.
std::size_t left_quantile_rank(double alpha, std::size_t n);

/// inf{t : F_N(t) >= alpha} = Z_(ceil(alpha N)). Domain error unless 0 < alpha <= 1.
double empirical_quantile(const EmpiricalDistribution& dist, double alpha);

/// Set of alpha-quantiles [Z_(ceil(alpha N)), Z_(floor(alpha N) + 1)] for
/// 0 < alpha < 1; these are the minimizers of the AVaR variational objective.
Interval quantile_interval(const EmpiricalDistribution& dist, double alpha);

/// AVaR_alpha(F_N) = (1 - alpha)^{-1} int_alpha^1 F_N^{-1}(u) du, integrated
/// exactly over the step quantile function. Domain error unless 0 <= alpha < 1.
double avar(const EmpiricalDistribution& dist, double alpha);

struct VariationalAvar {
  double value = 0.0;
  Interval minimizers;
};

/// min_t { t + (1 - alpha)^{-1} mean_j [Z_j - t]_+ } by a scan over the sample
/// breakpoints. Domain error unless 0 < alpha < 1.
VariationalAvar avar_variational(const EmpiricalDistribution& dist, double alpha);

/// phi(z, tau) = w0 z + sum_i w_i (tau_i + [z - tau_i]_+ / (1 - alpha_i)).
/// Throws std::invalid_argument when tau.size() != spec.k().
double phi(double z, const RiskSpec& spec, std::span<const double> tau);

/// d phi / d z at (z, tau), taking the indicator 1{z >= tau_i} on the kink.
double phi_slope(double z, const RiskSpec& spec, std::span<const double> tau);

/// R(F_N) = w0 mean + sum_i w_i AVaR_{alpha_i}(F_N).
double risk_plugin(const EmpiricalDistribution& dist, const RiskSpec& spec);

/// max over a finite uncertainty set of weight rows. All rows must share the
/// same levels. Throws std::invalid_argument on an empty list.
double risk_plugin_max(const EmpiricalDistribution& dist,
                       std::span<const RiskSpec> rows);

}  // namespace riskopt
