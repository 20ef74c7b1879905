#include "riskopt/hyptest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskopt/statfun.hpp"

namespace riskopt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

TestOutcome decide(double statistic, double threshold, std::string name) {
  return {statistic > threshold, statistic, threshold, std::move(name)};
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::domain_error("test level beta must lie in (0, 1)");
  }
}

void check_levels(std::span<const ConfidenceInterval> v) {
  for (const auto& ci : v) {
    if (std::abs(ci.level - v.front().level) > 1e-12) {
      throw std::invalid_argument("interval tests need intervals of a common level");
    }
  }
}

struct SampleMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // unbiased
};

SampleMoments moments(const Eigen::MatrixXd& samples) {
  const auto m = samples.rows();
  SampleMoments out;
  out.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - out.mean.transpose();
  out.cov = centered.transpose() * centered / static_cast<double>(m - 1);
  return out;
}

void check_invertible(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * std::max(1.0, ev.maxCoeff()))) {
    throw std::invalid_argument("sample covariance is singular");
  }
}

// P(G_{p,q} >= u) with G = (p/q) F_{p,q}.
double g_sf(double u, std::size_t p, std::size_t q) {
  if (p == 0) return u <= 0.0 ? 1.0 : 0.0;
  if (q == 0) return 1.0;  // no residual degrees of freedom: no evidence
  if (u <= 0.0) return 1.0;
  const double pd = static_cast<double>(p), qd = static_cast<double>(q);
  return f_sf(u * qd / pd, pd, qd);
}

}  // namespace

TestOutcome na_test_equality(std::span<const ConfidenceInterval> intervals) {
  if (intervals.size() < 2) throw std::invalid_argument("na_test_equality: need K >= 2");
  check_levels(intervals);
  double max_low = kNegInf, min_up = std::numeric_limits<double>::infinity();
  for (const auto& ci : intervals) {
    max_low = std::max(max_low, ci.low);
    min_up = std::min(min_up, ci.up);
  }
  return decide(max_low - min_up, 0.0, "na_equality");
}

TestOutcome na_test_dominance(std::span<const ConfidenceInterval> intervals,
                              std::size_t i) {
  if (intervals.size() < 2 || i >= intervals.size()) {
    throw std::invalid_argument("na_test_dominance: bad index or K < 2");
  }
  check_levels(intervals);
  double gap = kNegInf;
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    if (j != i) gap = std::max(gap, intervals[i].low - intervals[j].up);
  }
  return decide(gap, 0.0, "na_dominance");
}

TestOutcome na_test_ordered(std::span<const ConfidenceInterval> intervals) {
  if (intervals.size() < 2) throw std::invalid_argument("na_test_ordered: need K >= 2");
  check_levels(intervals);
  double gap = kNegInf;
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    gap = std::max(gap, intervals[i].low - intervals[i + 1].up);
  }
  return decide(gap, 0.0, "na_ordered");
}

TestOutcome na_test_value(const ConfidenceInterval& ci, double rho0,
                          ValueVariant variant) {
  switch (variant) {
    case ValueVariant::kTwoSided:
      return decide(std::max(rho0 - ci.up, ci.low - rho0), 0.0, "na_value_two_sided");
    case ValueVariant::kLessEqual:
      return decide(ci.low - rho0, 0.0, "na_value_le");
    case ValueVariant::kGreaterEqual:
      return decide(rho0 - ci.up, 0.0, "na_value_ge");
  }
  throw std::invalid_argument("na_test_value: unknown variant");
}

TestOutcome as_test_value(const SolveReport& report, double rho0, double beta,
                          ValueVariant variant) {
  check_beta(beta);
  const double se = report.nu_hat / std::sqrt(static_cast<double>(report.n));
  const double diff = report.value - rho0;
  switch (variant) {
    case ValueVariant::kTwoSided:
      return decide(std::abs(diff), se * normal_quantile(1.0 - beta / 2.0),
                    "as_value_two_sided");
    case ValueVariant::kLessEqual:
      return decide(diff, se * normal_quantile(1.0 - beta), "as_value_le");
    case ValueVariant::kGreaterEqual:
      return decide(-diff, se * normal_quantile(1.0 - beta), "as_value_ge");
  }
  throw std::invalid_argument("as_test_value: unknown variant");
}

TestOutcome as_test_two_sample(const SolveReport& r1, const SolveReport& r2,
                               double beta, PairVariant variant) {
  check_beta(beta);
  const double se = std::sqrt(r1.nu_hat * r1.nu_hat / static_cast<double>(r1.n) +
                              r2.nu_hat * r2.nu_hat / static_cast<double>(r2.n));
  if (variant == PairVariant::kEquality) {
    return decide(std::abs(r1.value - r2.value), se * normal_quantile(1.0 - beta / 2.0),
                  "as_two_sample_equality");
  }
  return decide(r1.value - r2.value, se * normal_quantile(1.0 - beta),
                "as_two_sample_dominance");
}

void ConeSpec::validate() const {
  if (A.rows() == 0 || A.rows() > A.cols()) {
    throw std::invalid_argument("ConeSpec: A must be k0 x K with 1 <= k0 <= K");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rank() != A.rows()) {
    throw std::invalid_argument("ConeSpec: A must have full row rank");
  }
}

TestOutcome hotelling_subspace_test(const Eigen::MatrixXd& samples,
                                    const ConeSpec& cone, double beta,
                                    HotellingFactor factor) {
  check_beta(beta);
  cone.validate();
  const auto m = static_cast<std::size_t>(samples.rows());
  const auto k = static_cast<std::size_t>(samples.cols());
  if (cone.A.cols() != samples.cols()) {
    throw std::invalid_argument("hotelling_subspace_test: A and samples disagree on K");
  }
  if (m < k + 1) throw std::invalid_argument("hotelling_subspace_test: need M >= K + 1");
  const auto [mean, cov] = moments(samples);
  check_invertible(cov);

  // min over {A theta = 0} of the Sigma^-1 distance: (A th)' (A Sigma A')^-1 (A th).
  const Eigen::VectorXd r = cone.A * mean;
  const Eigen::MatrixXd g = cone.A * cov * cone.A.transpose();
  const double q = r.dot(g.ldlt().solve(r));
  const double lead = factor == HotellingFactor::kSampleSize ? static_cast<double>(m)
                                                             : static_cast<double>(k);
  const auto k0 = static_cast<double>(cone.A.rows());
  const double md = static_cast<double>(m);
  const double threshold =
      k0 * (md - 1.0) / (md - k0) * f_quantile(1.0 - beta, k0, md - k0);
  return decide(lead * q, threshold, "hotelling_subspace");
}

Eigen::VectorXd project_cone(const Eigen::VectorXd& x, const Eigen::MatrixXd& S,
                             const ConeSpec& cone) {
  const Eigen::MatrixXd& A = cone.A;
  const auto k0 = static_cast<int>(A.rows());
  if (A.cols() != x.size() || S.rows() != x.size() || S.cols() != x.size()) {
    throw std::invalid_argument("project_cone: dimension mismatch");
  }
  if (k0 > 20) throw std::invalid_argument("project_cone: too many constraints");
  const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
  const double tol = 1e-10 * scale;

  // KKT: y = x - S A_J' lambda, A_J y = 0, lambda >= 0, A y <= 0.
  auto solve_active = [&](unsigned mask, Eigen::VectorXd& y) {
    std::vector<int> rows;
    for (int i = 0; i < k0; ++i) {
      if (mask & (1u << i)) rows.push_back(i);
    }
    y = x;
    if (rows.empty()) return true;
    Eigen::MatrixXd aj(rows.size(), A.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) aj.row(r) = A.row(rows[r]);
    const Eigen::VectorXd lambda =
        (aj * S * aj.transpose()).ldlt().solve(aj * x);
    if (cone.kind == ConeSpec::Kind::kCone && lambda.minCoeff() < -tol) return false;
    y = x - S * aj.transpose() * lambda;
    return true;
  };

  if (cone.kind == ConeSpec::Kind::kSubspace) {
    Eigen::VectorXd y;
    solve_active((1u << k0) - 1u, y);
    return y;
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(S);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_y;
  Eigen::VectorXd y;
  for (unsigned mask = 0; mask < (1u << k0); ++mask) {
    if (!solve_active(mask, y)) continue;
    if ((A * y).maxCoeff() > tol) continue;
    const Eigen::VectorXd d = x - y;
    const double dist = d.dot(chol.solve(d));
    if (dist < best) {
      best = dist;
      best_y = y;
    }
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("project_cone: no feasible KKT point");
  }
  return best_y;
}

double perlman_err(double u, std::size_t K, std::size_t M) {
  if (K == 0 || M < K + 1) throw std::invalid_argument("perlman_err: need M >= K + 1 >= 2");
  return 0.5 * (g_sf(u, K - 1, M - K - 1) + g_sf(u, K, M - K));
}

TestOutcome perlman_cone_test(const Eigen::MatrixXd& samples, const ConeSpec& cone,
                              double beta) {
  check_beta(beta);
  cone.validate();
  const auto m = static_cast<std::size_t>(samples.rows());
  const auto k = static_cast<std::size_t>(samples.cols());
  if (cone.A.cols() != samples.cols()) {
    throw std::invalid_argument("perlman_cone_test: A and samples disagree on K");
  }
  if (m < k + 1) throw std::invalid_argument("perlman_cone_test: need M >= K + 1");
  const auto [mean, cov] = moments(samples);
  check_invertible(cov);
  const Eigen::MatrixXd S = cov * (static_cast<double>(m) - 1.0) / static_cast<double>(m);
  const Eigen::VectorXd p = project_cone(mean, S, cone);
  const Eigen::VectorXd d = mean - p;
  const double u = d.dot(S.ldlt().solve(d));

  // Err is nonincreasing in u; bracket then bisect.
  double lo = 0.0, hi = 1.0;
  while (perlman_err(hi, k, m) > beta) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("perlman_cone_test: cannot bracket u_beta");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (perlman_err(mid, k, m) > beta ? lo : hi) = mid;
  }
  return decide(u, hi, "perlman_cone");
}

double separation_margin(const ConfidenceInterval& i, const ConfidenceInterval& j) {
  return i.width() + j.width();
}

}  // namespace riskopt
