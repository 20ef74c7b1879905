// Seeded samplers for the experiment distributions: truncated normals and
// vectors of independent +-1 Bernoulli entries.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riskopt/rng.hpp"

namespace riskopt {

/// N(m, s2) conditioned on [a0, b0].
class TruncNormalSpec {
 public:
  /// Throws std::invalid_argument if s2 <= 0, a0 >= b0 or the interval
  /// carries no parent mass in double precision.
  TruncNormalSpec(double m, double s2, double a0, double b0);

  double m() const { return m_; }
  double s2() const { return s2_; }
  double sd() const { return sd_; }
  double a0() const { return a0_; }
  double b0() const { return b0_; }

  double cdf(double x) const;
  double quantile(double u) const;
  /// Exact moments and tail mean of the truncated law.
  double mean() const;
  double variance() const;
  /// E[X | X >= F^{-1}(alpha)], the AVaR of the continuous truncated law.
  double avar(double alpha) const;

 private:
  double m_, s2_, sd_, a0_, b0_;
  double lo_cdf_, hi_cdf_;  // parent cdf at the standardized bounds
  bool reflect_;            // sample through the upper tail when it is thinner
};

double truncnorm_cdf(const TruncNormalSpec& spec, double x);

/// Inverse-cdf sampling; consumes exactly `count` uniforms.
std::vector<double> truncnorm_sample(const TruncNormalSpec& spec,
                                     RngStream& stream, std::size_t count);

/// Row-major count x cols matrix of scenarios.
class ScenarioMatrix {
 public:
  ScenarioMatrix() = default;
  ScenarioMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  ScenarioMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// One scenario per row from a scalar sample.
  static ScenarioMatrix column(std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// P(xi_i = +1) = psi_i, P(xi_i = -1) = 1 - psi_i.
class BernoulliVectorSpec {
 public:
  explicit BernoulliVectorSpec(std::vector<double> psi);
  std::size_t size() const { return psi_.size(); }
  std::span<const double> psi() const { return psi_; }
  double mean(std::size_t i) const { return 2.0 * psi_[i] - 1.0; }

 private:
  std::vector<double> psi_;
};

ScenarioMatrix bernoulli_vector_sample(const BernoulliVectorSpec& spec,
                                       RngStream& stream, std::size_t count);

/// psi_i ~ U[0, 1] independently, each multiplied by `scale`.
std::vector<double> uniform_probabilities(RngStream& stream, std::size_t n,
                                          double scale = 1.0);

}  // namespace riskopt
