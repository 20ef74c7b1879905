// Tests on optimal values: interval-based (nonasymptotic) regions, asymptotic
// z-tests, the Hotelling subspace test and Perlman's one-sided cone test.
// A statistic equal to its threshold never rejects.
#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "riskopt/confidence.hpp"
#include "riskopt/saa.hpp"

namespace riskopt {

struct TestOutcome {
  bool reject = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string test;
};

/// H0: v = rho0 (two-sided), v <= rho0 (kLessEqual), v >= rho0 (kGreaterEqual).
enum class ValueVariant { kTwoSided, kLessEqual, kGreaterEqual };
/// H0: v1 = v2 (kEquality) or v1 <= v2 (kDominance).
enum class PairVariant { kEquality, kDominance };

/// H0: all optimal values are equal. Rejects iff max Low > min Up.
/// Throws std::invalid_argument when K < 2 or the levels differ.
TestOutcome na_test_equality(std::span<const ConfidenceInterval> intervals);
/// H0: v_i <= v_j for all j. Rejects iff Low_i > Up_j for some j != i.
TestOutcome na_test_dominance(std::span<const ConfidenceInterval> intervals,
                              std::size_t i);
/// H0: v_1 <= ... <= v_K. Rejects iff Low_i > Up_{i+1} for some i.
TestOutcome na_test_ordered(std::span<const ConfidenceInterval> intervals);
TestOutcome na_test_value(const ConfidenceInterval& interval, double rho0,
                          ValueVariant variant);

/// z-test of v = rho0 / v <= rho0 / v >= rho0 from one SAA solve.
TestOutcome as_test_value(const SolveReport& report, double rho0, double beta,
                          ValueVariant variant);
/// Two independent SAA solves of the same size.
TestOutcome as_test_two_sample(const SolveReport& r1, const SolveReport& r2,
                               double beta, PairVariant variant);

/// Theta0 = {A theta = 0} (kSubspace) or {A theta <= 0} (kCone); A is
/// k0 x K with full row rank.
struct ConeSpec {
  enum class Kind { kSubspace, kCone };
  Eigen::MatrixXd A;
  Kind kind = Kind::kSubspace;

  /// Throws std::invalid_argument unless rank(A) = rows(A) <= cols(A).
  void validate() const;
};

/// Leading factor of T^2 = factor * min_{A theta = 0} (th - theta)' S^-1 (th - theta).
/// kSampleSize uses M (the classical Hotelling statistic, whose law is the
/// F threshold below); kDimension uses K.
enum class HotellingFactor { kSampleSize, kDimension };

/// Rows of `samples` are M replications of theta_hat in R^K. Rejects iff
/// T^2 > k0 (M - 1) / (M - k0) F^{-1}_{k0, M-k0}(1 - beta).
/// Throws std::invalid_argument when M < K + 1 or the covariance is singular.
TestOutcome hotelling_subspace_test(const Eigen::MatrixXd& samples,
                                    const ConeSpec& cone, double beta,
                                    HotellingFactor factor = HotellingFactor::kSampleSize);

/// Closest point of {A y <= 0} (or {A y = 0}) to x in the metric
/// ||v||_S^2 = v' S^-1 v, by enumeration of active sets.
Eigen::VectorXd project_cone(const Eigen::VectorXd& x, const Eigen::MatrixXd& S,
                             const ConeSpec& cone);

/// Err(u) = 1/2 [P(G_{K-1, M-K-1} >= u) + P(G_{K, M-K} >= u)], G_{p,q} = (p/q) F_{p,q};
/// G_{0, q} is the point mass at 0.
double perlman_err(double u, std::size_t K, std::size_t M);

/// U = ||th - Pi_S(th | Theta0)||_S^2 with S = (M-1)/M Sigma_hat; rejects iff
/// U > u_beta where Err(u_beta) = beta.
TestOutcome perlman_cone_test(const Eigen::MatrixXd& samples, const ConeSpec& cone,
                              double beta);

/// (Up_i - Low_i) + (Up_j - Low_j): the gap the true values must exceed for
/// the type-II bounds of the interval tests to apply.
double separation_margin(const ConfidenceInterval& i, const ConfidenceInterval& j);

}  // namespace riskopt
