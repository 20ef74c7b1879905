#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "riskopt/statfun.hpp"

using namespace riskopt;

TEST(Normal, CdfMatchesErfSeries) {
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    // the series loses ~1e-14 to cancellation near |x| = 6
    EXPECT_NEAR(normal_cdf(x), oracle::normal_cdf_series(x), 5e-14) << x;
    EXPECT_NEAR(normal_sf(x), 1.0 - oracle::normal_cdf_series(x), 5e-14) << x;
  }
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-16);
}

TEST(Normal, QuantileAgainstSeriesBisection) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  for (double p : {0.95, 0.975, 0.9, 0.6, 0.01, 1e-6, 0.999999}) {
    const double ref = oracle::bisect(
        [p](double x) { return oracle::normal_cdf_series(x) - p; }, -6.0, 6.0);
    EXPECT_NEAR(normal_quantile(p), ref, 1e-9) << p;
  }
  EXPECT_NEAR(normal_quantile(0.95), 1.6449, 1e-4);
  EXPECT_NEAR(normal_quantile(0.975), 1.9600, 1e-4);
  EXPECT_THROW(normal_quantile(0.0), std::domain_error);
  EXPECT_THROW(normal_quantile(1.0), std::domain_error);
}

TEST(FDistribution, ClosedFormFamilies) {
  // d1 = 2: F(x) = 1 - (1 + 2x/d2)^(-d2/2);  d2 = 2: F(x) = (d1 x / (d1 x + 2))^(d1/2).
  for (double d2 : {1.0, 3.0, 10.0, 57.0}) {
    for (double x : {0.05, 0.5, 1.0, 2.0, 7.5}) {
      EXPECT_NEAR(f_cdf(x, 2.0, d2), 1.0 - std::pow(1.0 + 2.0 * x / d2, -d2 / 2.0), 1e-12);
    }
  }
  for (double d1 : {1.0, 4.0, 9.0}) {
    for (double x : {0.05, 0.5, 1.0, 2.0, 7.5}) {
      EXPECT_NEAR(f_cdf(x, d1, 2.0), std::pow(d1 * x / (d1 * x + 2.0), d1 / 2.0), 1e-12);
      EXPECT_NEAR(f_sf(x, d1, 2.0), 1.0 - f_cdf(x, d1, 2.0), 1e-12);
    }
  }
}

TEST(FDistribution, Quantiles) {
  for (double d : {1.0, 2.0, 5.0, 30.0}) EXPECT_NEAR(f_quantile(0.5, d, d), 1.0, 1e-10);
  // chi2_2 quantile / 2 = -ln(0.05) in the d2 -> infinity limit.
  EXPECT_NEAR(f_quantile(0.95, 2.0, 1e6), -std::log(0.05), 1e-2);
  for (double p : {0.05, 0.5, 0.9, 0.99}) {
    const double x = f_quantile(p, 3.0, 17.0);
    EXPECT_NEAR(f_cdf(x, 3.0, 17.0), p, 1e-10);
  }
  EXPECT_THROW(f_quantile(1.0, 2.0, 3.0), std::domain_error);
  EXPECT_THROW(f_cdf(1.0, 0.0, 3.0), std::domain_error);
}

TEST(ChiSquare, SurvivalClosedForms) {
  for (double x : {0.1, 1.0, 5.99, 20.0}) {
    EXPECT_NEAR(chi2_sf(x, 2.0), std::exp(-x / 2.0), 1e-14);
    EXPECT_NEAR(chi2_sf(x, 4.0), std::exp(-x / 2.0) * (1.0 + x / 2.0), 1e-14);
  }
}

TEST(Summary, MomentsByHand) {
  const std::vector<double> v = {1, 2, 3, 4, 10};
  const auto m = summarize(v);
  EXPECT_EQ(m.n, 5u);
  EXPECT_DOUBLE_EQ(m.mean, 4.0);
  EXPECT_DOUBLE_EQ(m.variance, 12.5);
  // population moments: m2 = 10, m3 = (-27 - 8 - 1 + 0 + 216) / 5 = 36
  EXPECT_NEAR(m.skewness, 36.0 / std::pow(10.0, 1.5), 1e-14);
  EXPECT_NEAR(m.kurtosis, (81 + 16 + 1 + 0 + 1296) / 5.0 / 100.0, 1e-14);
  EXPECT_TRUE(summarize(std::vector<double>{2, 2, 2}).degenerate);
  EXPECT_DOUBLE_EQ(sample_sd(std::vector<double>{1, 3}), std::sqrt(2.0));
  EXPECT_THROW(sample_sd(std::vector<double>{1}), std::invalid_argument);
}

TEST(JarqueBera, SymmetricMesokurticSampleGivesZero) {
  // {-1, 1, 0, 0, 0, 0}: S = 0 and m4 / m2^2 = (2/6) / (2/6)^2 = 3.
  const std::vector<double> v = {-1, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0};
  const auto jb = jarque_bera(v);
  EXPECT_NEAR(jb.statistic, 0.0, 1e-12);
  EXPECT_NEAR(jb.p_value, 1.0, 1e-12);
}

TEST(JarqueBera, NormalVersusExponential) {
  int normal_accepts = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(200);
    for (double& x : v) x = nd(gen);
    normal_accepts += jarque_bera(v).p_value > 0.05;
  }
  EXPECT_GE(normal_accepts, 18);
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> ed;
  std::vector<double> v(200);
  for (double& x : v) x = ed(gen);
  EXPECT_LT(jarque_bera(v).p_value, 0.01);
  EXPECT_THROW(jarque_bera(std::vector<double>(10, 1.0)), std::invalid_argument);
  EXPECT_THROW(jarque_bera(std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(CovPospart, DegenerateCases) {
  auto point = [](double x) { return x >= 5.0 ? 1.0 : 0.0; };
  EXPECT_NEAR(cov_pospart_oracle(point, 2.0, 10.0, 400), 0.0, 1e-12);
  auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_EQ(cov_pospart_oracle(unif, 2.0, 1.0, 400), 0.0);
  auto bad = [](double x) { return std::sin(x); };
  EXPECT_THROW(cov_pospart_oracle(bad, 0.0, 10.0, 400), std::invalid_argument);
}

TEST(CovPospart, UniformClosedForm) {
  // Z ~ U[0, 1], tau: E[(Z - tau)_+] = (1 - tau)^2 / 2, E[(Z - tau)_+^2] = (1 - tau)^3 / 3.
  auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
  for (double tau : {0.0, 0.3, 0.8}) {
    const double e1 = std::pow(1.0 - tau, 2) / 2.0, e2 = std::pow(1.0 - tau, 3) / 3.0;
    EXPECT_NEAR(cov_pospart_oracle(unif, tau, 1.0, 2000), e2 - e1 * e1, 1e-6);
  }
}
