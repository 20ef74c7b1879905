#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "riskopt/hyptest.hpp"

using namespace riskopt;

namespace {

ConfidenceInterval ci(double low, double up, double level = 0.9) {
  return {low, up, level, CiMethod::kRsa};
}

SolveReport report(double value, double nu, std::size_t n) {
  SolveReport r;
  r.value = value;
  r.nu_hat = nu;
  r.n = n;
  return r;
}

}  // namespace

TEST(IntervalTests, Equality) {
  const std::vector<ConfidenceInterval> overlap = {ci(0, 2), ci(1, 3), ci(1.5, 4)};
  EXPECT_FALSE(na_test_equality(overlap).reject);
  const std::vector<ConfidenceInterval> touch = {ci(0, 1), ci(1, 2)};
  EXPECT_FALSE(na_test_equality(touch).reject);  // statistic == threshold
  const std::vector<ConfidenceInterval> apart = {ci(0, 1), ci(0.5, 2), ci(1.2, 3)};
  const auto t = na_test_equality(apart);
  EXPECT_TRUE(t.reject);
  EXPECT_DOUBLE_EQ(t.statistic, 0.2);
  EXPECT_THROW(na_test_equality(std::vector<ConfidenceInterval>{ci(0, 1)}), std::invalid_argument);
  EXPECT_THROW(na_test_equality(std::vector<ConfidenceInterval>{ci(0, 1), ci(0, 1, 0.95)}),
               std::invalid_argument);
}

TEST(IntervalTests, DominanceOrderedAndValue) {
  const std::vector<ConfidenceInterval> v = {ci(2, 3), ci(0, 1), ci(4, 5)};
  EXPECT_TRUE(na_test_dominance(v, 0).reject);   // Low_0 > Up_1
  EXPECT_FALSE(na_test_dominance(v, 1).reject);
  EXPECT_TRUE(na_test_ordered(v).reject);
  const std::vector<ConfidenceInterval> sorted = {ci(0, 1), ci(0.5, 3), ci(2, 5)};
  EXPECT_FALSE(na_test_ordered(sorted).reject);
  EXPECT_THROW(na_test_dominance(v, 3), std::invalid_argument);

  const auto c = ci(1, 2);
  EXPECT_FALSE(na_test_value(c, 1.5, ValueVariant::kTwoSided).reject);
  EXPECT_TRUE(na_test_value(c, 2.5, ValueVariant::kTwoSided).reject);
  EXPECT_TRUE(na_test_value(c, 0.5, ValueVariant::kLessEqual).reject);
  EXPECT_FALSE(na_test_value(c, 2.5, ValueVariant::kLessEqual).reject);
  EXPECT_TRUE(na_test_value(c, 2.5, ValueVariant::kGreaterEqual).reject);
  EXPECT_FALSE(na_test_value(c, 0.5, ValueVariant::kGreaterEqual).reject);
  EXPECT_DOUBLE_EQ(separation_margin(ci(0, 1), ci(3, 5)), 3.0);
}

TEST(AsymptoticTests, ThresholdsByHand) {
  const SolveReport r = report(1.0, 2.0, 100);  // se 0.2
  const auto two = as_test_value(r, 1.3, 0.1, ValueVariant::kTwoSided);
  EXPECT_NEAR(two.threshold, 0.2 * 1.6448536269514722, 1e-12);
  EXPECT_NEAR(two.statistic, 0.3, 1e-12);
  EXPECT_FALSE(two.reject);
  EXPECT_TRUE(as_test_value(r, 1.4, 0.1, ValueVariant::kTwoSided).reject);
  EXPECT_TRUE(as_test_value(r, 0.7, 0.1, ValueVariant::kLessEqual).reject);
  EXPECT_FALSE(as_test_value(r, 0.7, 0.1, ValueVariant::kGreaterEqual).reject);
  EXPECT_NEAR(as_test_value(r, 0.0, 0.1, ValueVariant::kLessEqual).threshold,
              0.2 * 1.2815515655446004, 1e-12);

  const auto eq = as_test_two_sample(report(1.0, 3.0, 100), report(2.0, 4.0, 100), 0.05,
                                     PairVariant::kEquality);
  EXPECT_NEAR(eq.threshold, 0.5 * 1.959963984540054, 1e-12);
  EXPECT_TRUE(eq.reject);
  EXPECT_FALSE(as_test_two_sample(report(1.0, 3.0, 100), report(2.0, 4.0, 100), 0.05,
                                  PairVariant::kDominance)
                   .reject);
  EXPECT_THROW(as_test_value(r, 0.0, 1.0, ValueVariant::kTwoSided), std::domain_error);
}

TEST(AsymptoticTests, TwoSampleCalibration) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd(3.0, 2.0);
  const int reps = 400;
  int rejects = 0;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> a(200), b(200);
    for (double& x : a) x = nd(gen);
    for (double& x : b) x = nd(gen);
    rejects += as_test_two_sample(report(oracle::mean(a), oracle::sd(a), 200),
                                  report(oracle::mean(b), oracle::sd(b), 200), 0.1,
                                  PairVariant::kEquality)
                   .reject;
  }
  EXPECT_NEAR(rejects / double(reps), 0.1, 3.0 * std::sqrt(0.09 / reps));
}

TEST(Hotelling, OneDimensionIsSquaredT) {
  Eigen::MatrixXd s(3, 1);
  s << 1.0, 2.0, 4.0;
  ConeSpec cone{Eigen::MatrixXd::Ones(1, 1), ConeSpec::Kind::kSubspace};
  const auto t = hotelling_subspace_test(s, cone, 0.1);
  const double mean = 7.0 / 3.0, var = ((mean - 1) * (mean - 1) + (mean - 2) * (mean - 2) +
                                        (mean - 4) * (mean - 4)) / 2.0;
  EXPECT_NEAR(t.statistic, 3.0 * mean * mean / var, 1e-12);
  // F_{1,2}(0.9) = t_2(0.95)^2, t_2(p) = (2p - 1) / sqrt(2 p (1 - p)).
  const double t2 = 0.9 / std::sqrt(2.0 * 0.95 * 0.05);
  EXPECT_NEAR(t.threshold, t2 * t2, 1e-8);
  const auto dim = hotelling_subspace_test(s, cone, 0.1, HotellingFactor::kDimension);
  EXPECT_NEAR(dim.statistic, mean * mean / var, 1e-12);
}

TEST(Hotelling, RejectsBadInput) {
  ConeSpec cone{Eigen::MatrixXd::Ones(1, 2), ConeSpec::Kind::kSubspace};
  EXPECT_THROW(hotelling_subspace_test(Eigen::MatrixXd::Random(2, 2), cone, 0.1),
               std::invalid_argument);
  Eigen::MatrixXd flat(5, 2);
  flat << 1, 1, 2, 2, 3, 3, 4, 4, 5, 5;
  EXPECT_THROW(hotelling_subspace_test(flat, cone, 0.1), std::invalid_argument);
  ConeSpec deficient{Eigen::MatrixXd::Ones(2, 2), ConeSpec::Kind::kSubspace};
  EXPECT_THROW(deficient.validate(), std::invalid_argument);
}

TEST(Hotelling, CalibrationUnderNull) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(1, 2);
  a << 1.0, -1.0;
  const ConeSpec cone{a, ConeSpec::Kind::kSubspace};
  const int reps = 2000;
  int rejects = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd s(25, 2);
    for (int i = 0; i < 25; ++i) {
      const double z1 = nd(gen), z2 = nd(gen);
      s(i, 0) = 4.0 + z1;
      s(i, 1) = 4.0 + 0.6 * z1 + 1.5 * z2;
    }
    rejects += hotelling_subspace_test(s, cone, 0.1).reject;
  }
  EXPECT_NEAR(rejects / double(reps), 0.1, 3.0 * std::sqrt(0.09 / reps));
}

TEST(ProjectCone, QuadrantAgainstRaySearch) {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> nd;
  const ConeSpec cone{Eigen::MatrixXd::Identity(2, 2), ConeSpec::Kind::kCone};
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Matrix2d b;
    b << nd(gen), nd(gen), nd(gen), nd(gen);
    const Eigen::Matrix2d S = b * b.transpose() + 0.2 * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d Sinv = S.inverse();
    const Eigen::Vector2d x(2.0 * nd(gen), 2.0 * nd(gen));
    auto dist = [&](const Eigen::Vector2d& y) { return (x - y).dot(Sinv * (x - y)); };
    double ref = dist(Eigen::Vector2d::Zero());
    if (x.maxCoeff() <= 0.0) ref = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      auto on_ray = [&](double t) {
        Eigen::Vector2d y(0.0, 0.0);
        y[1 - axis] = t;
        return dist(y);
      };
      ref = std::min(ref, on_ray(oracle::golden_min(on_ray, -50.0, 0.0, 200)));
    }
    const Eigen::VectorXd p = project_cone(x, S, cone);
    EXPECT_LE(p.maxCoeff(), 1e-9);
    EXPECT_NEAR(dist(p), ref, 1e-9 * (1.0 + ref)) << rep;
  }
  const ConeSpec plane{Eigen::RowVector2d(1.0, -1.0), ConeSpec::Kind::kSubspace};
  const Eigen::VectorXd q = project_cone(Eigen::Vector2d(3.0, 1.0), Eigen::Matrix2d::Identity(), plane);
  EXPECT_NEAR(q[0], 2.0, 1e-12);
  EXPECT_NEAR(q[1], 2.0, 1e-12);
}

TEST(Perlman, ErrClosedForm) {
  // K = 2, M = 5: G_{1,2} >= u  <=>  |T_2| >= sqrt(2u);  G_{2,3} >= u  <=>  F_{2,3} >= 1.5u.
  for (double u : {0.01, 0.3, 1.0, 4.0, 30.0}) {
    const double ref = 0.5 * (1.0 - std::sqrt(u / (1.0 + u)) + std::pow(1.0 + u, -1.5));
    EXPECT_NEAR(perlman_err(u, 2, 5), ref, 1e-10) << u;
  }
  EXPECT_NEAR(perlman_err(0.0, 2, 5), 1.0, 1e-12);
  EXPECT_THROW(perlman_err(1.0, 3, 3), std::invalid_argument);
}

TEST(Perlman, OneDimensionAndBoundaryRate) {
  Eigen::MatrixXd s(4, 1);
  s << -3.0, -1.0, -2.0, -2.5;
  const ConeSpec cone{Eigen::MatrixXd::Ones(1, 1), ConeSpec::Kind::kCone};
  const auto inside = perlman_cone_test(s, cone, 0.1);
  EXPECT_EQ(inside.statistic, 0.0);
  EXPECT_FALSE(inside.reject);

  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  const ConeSpec quadrant{a, ConeSpec::Kind::kCone};
  const int reps = 2000;
  int rejects = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd m(30, 2);
    for (int i = 0; i < 30; ++i) {
      const double z1 = nd(gen), z2 = nd(gen);
      m(i, 0) = z1;
      m(i, 1) = 0.5 * z1 + z2;
    }
    rejects += perlman_cone_test(m, quadrant, 0.1).reject;
  }
  EXPECT_LE(rejects / double(reps), 0.1 + 0.03);
}
