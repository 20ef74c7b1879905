#include <gtest/gtest.h>

#include "oracles.hpp"
#include "riskopt/program.hpp"
#include "riskopt/rsa.hpp"

using namespace riskopt;

TEST(Thetas, ClosedFormsAndRoot) {
  const Thetas th = compute_thetas(0.1);
  EXPECT_NEAR(th.theta1, 2.0 * std::sqrt(std::log(20.0)), 1e-14);
  EXPECT_NEAR(th.theta3, 2.0 * std::sqrt(std::log(40.0)), 1e-14);
  EXPECT_NEAR(th.theta1, 3.4616, 1e-3);
  EXPECT_NEAR(th.theta3, 3.8413, 1e-3);
  const double t = th.theta2;
  EXPECT_LT(std::abs(std::exp(1.0 - t * t) + std::exp(-t * t / 4.0) - 0.025), 1e-10);
  const double ref = oracle::bisect(
      [](double x) { return std::exp(1.0 - x * x) + std::exp(-x * x / 4.0) - 0.025; }, 1.0, 10.0);
  EXPECT_NEAR(t, ref, 1e-10);
  EXPECT_THROW(compute_thetas(0.0), std::domain_error);
  EXPECT_THROW(compute_thetas(1.0), std::domain_error);
}

TEST(RsaConstants, ScalarCaseWidth) {
  const RiskSpec spec = RiskSpec::mean_avar(0.1, 0.9, 0.9);
  const TauReformulation program(spec, 0.0, 30.0);
  EXPECT_DOUBLE_EQ(program.diameter(), 15.0);
  const RsaConstants c = scalar_case_constants(spec, 0.0, 30.0, 0.0, program.diameter());
  EXPECT_DOUBLE_EQ(c.L, 9.0 * 0.9);
  EXPECT_DOUBLE_EQ(c.M2, 9.0);
  EXPECT_DOUBLE_EQ(c.M1, 0.1 * 30.0 + 9.0 * 30.0);
  // K1 = D (M2^2 + 2 L^2) / sqrt(2 (M2^2 + L^2)), K2 = D M2^2 / sqrt(...) + 2 D M2 + M1.
  const double root = std::sqrt(2.0 * (81.0 + 65.61));
  EXPECT_NEAR(c.K1, 15.0 * (81.0 + 2.0 * 65.61) / root, 1e-12);
  EXPECT_NEAR(c.K2, 15.0 * 81.0 / root + 2.0 * 15.0 * 9.0 + 273.0, 1e-12);
  const Thetas th = compute_thetas(0.1);
  const std::size_t n = 100000;
  EXPECT_NEAR(c.width(th, n), 11.03, 0.3);
  const auto ci = bounds(5.0, c, th, n);
  EXPECT_NEAR(ci.up - ci.low, c.width(th, n), 1e-12);
  EXPECT_DOUBLE_EQ(ci.up, 5.0 + th.theta1 * c.M1 / std::sqrt(1e5));
  EXPECT_DOUBLE_EQ(ci.level, 0.9);
  EXPECT_EQ(ci.method, CiMethod::kRsa);
  // width ~ 1/sqrt(N)
  EXPECT_NEAR(c.width(th, 4 * n), c.width(th, n) / 2.0, 1e-12);
  EXPECT_NEAR(c.step(n), 15.0 / std::sqrt(1e5 * (81.0 + 65.61)), 1e-15);
}

TEST(RsaConstants, DegenerateAndInvalid) {
  const RsaConstants flat = RsaConstants::make(0.0, 2.0, 0.0, 3.0);
  EXPECT_EQ(flat.step(100), 0.0);
  EXPECT_EQ(flat.K1, 0.0);
  EXPECT_EQ(flat.K2, 2.0);
  EXPECT_THROW(RsaConstants::make(-1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RsaConstants::make(1.0, NAN, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(bounds(0.0, flat, compute_thetas(0.1), 0), std::invalid_argument);
}

TEST(RsaConstants, PortfolioClosedForm) {
  const RiskSpec spec = RiskSpec::mean_avar(0.9, 0.1, 0.9);
  const RsaConstants c = portfolio_constants(spec, 100, 2.0);
  const double cc = 0.9 + 1.0;
  EXPECT_NEAR(c.M1, 2.0 * cc, 1e-14);
  EXPECT_NEAR(c.L, std::sqrt(0.81 + 100 * cc * cc) + 4.0, 1e-12);
  EXPECT_NEAR(c.M2, std::sqrt(1.0 + 400 * cc * cc), 1e-12);
  EXPECT_NEAR(c.D, std::sqrt(2.0 - 0.01), 1e-14);
}

TEST(RunRsa, SingleDrawAndDeterminism) {
  const RiskSpec spec = RiskSpec::mean_avar(0.1, 0.9, 0.9);
  const TauReformulation program(spec, 0.0, 30.0);
  const RsaConstants c = scalar_case_constants(spec, 0.0, 30.0, 0.0, program.diameter());
  const ScenarioMatrix one = ScenarioMatrix::column({12.0});
  const RsaRun r = run_rsa(program, c, one);
  // One step from tau_1 = 15: H = 0.1 * 12 + 0.9 * (15 + [12 - 15]_+ / 0.1).
  EXPECT_DOUBLE_EQ(r.g_bar, 0.1 * 12.0 + 0.9 * 15.0);
  ASSERT_EQ(r.draws.size(), 1u);

  RngStream s1(3, 0), s2(3, 0);
  const TruncNormalSpec d(10.0, 1.0, 0.0, 30.0);
  const auto a = run_rsa(program, c, ScenarioMatrix::column(truncnorm_sample(d, s1, 500)));
  const auto b = run_rsa(program, c, ScenarioMatrix::column(truncnorm_sample(d, s2, 500)));
  EXPECT_EQ(a.g_bar, b.g_bar);
  EXPECT_THROW(run_rsa(program, c, ScenarioMatrix(0, 1)), std::invalid_argument);
}

TEST(RunRsa, ConvergesOnDeterministicLoss) {
  // xi == 7 always: R = 7 for any spec; the averaged tau approaches the
  // minimizer region and Gbar approaches 7 at rate ~ 1/sqrt(N).
  const RiskSpec spec = RiskSpec::mean_avar(0.5, 0.5, 0.9);
  const TauReformulation program(spec, 0.0, 30.0);
  const RsaConstants c = scalar_case_constants(spec, 0.0, 30.0, 0.0, program.diameter());
  double prev = INFINITY;
  for (std::size_t n : {100u, 10000u, 1000000u}) {
    const RsaRun r = run_rsa(program, c, ScenarioMatrix::column(std::vector<double>(n, 7.0)));
    const double err = r.g_bar - 7.0;
    EXPECT_GE(err, -1e-9);
    EXPECT_LT(err, prev);
    EXPECT_LE(err, c.width(compute_thetas(0.1), n));
    prev = err;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(RunRsa, KeepsTrajectoryInsideTheBox) {
  const RiskSpec spec = RiskSpec::mean_avar(0.2, 0.8, 0.5);
  const TauReformulation program(spec, 0.0, 30.0);
  const RsaConstants c = scalar_case_constants(spec, 0.0, 30.0, 0.0, program.diameter());
  RngStream s(4, 4);
  const auto sample =
      ScenarioMatrix::column(truncnorm_sample(TruncNormalSpec(10.0, 49.0, 0.0, 30.0), s, 200));
  RsaOptions opt;
  opt.keep_trajectory = true;
  const RsaRun r = run_rsa(program, c, sample, opt);
  ASSERT_EQ(r.trajectory.size(), 200u);
  for (const auto& x : r.trajectory) {
    ASSERT_EQ(x.size(), 1u);
    ASSERT_TRUE(x[0] >= 0.0 && x[0] <= 30.0);
  }
}
