#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "riskopt/rng.hpp"
#include "riskopt/samplers.hpp"

using namespace riskopt;

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    firsts.insert(x);
  }
  EXPECT_EQ(firsts.size(), 100u);
  EXPECT_NE(RngStream(42, 7).next(), c.next());
  EXPECT_NE(RngStream(42, 7).next(), d.next());
  EXPECT_NE(combine_ids(1, 2), combine_ids(2, 1));
}

TEST(Rng, UniformOpenMoments) {
  RngStream s(1, 0);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 0.005);
}

TEST(TruncNormal, CdfAgainstQuadrature) {
  const TruncNormalSpec spec(10.0, 1.0, 0.0, 30.0);
  EXPECT_EQ(truncnorm_cdf(spec, 0.0), 0.0);
  EXPECT_EQ(truncnorm_cdf(spec, 30.0), 1.0);
  EXPECT_NEAR(truncnorm_cdf(spec, 10.0), 0.5, 1e-9);
  for (auto [m, s2] : {std::pair{10.0, 49.0}, {5.0, 1.0}, {10.0, 25.0}, {14.0, 0.25}}) {
    const TruncNormalSpec t(m, s2, 0.0, 30.0);
    const oracle::TruncNormalQuad q(m, s2, 0.0, 30.0);
    for (double x : {1.0, m - 1.0, m, m + 0.3, 25.0}) {
      EXPECT_NEAR(t.cdf(x), q.cdf(x), 1e-9) << m << " " << s2 << " " << x;
    }
  }
}

TEST(TruncNormal, ExactMomentsAgainstQuadrature) {
  for (auto [m, s2] : {std::pair{10.0, 1.0}, {20.0, 1.0}, {5.0, 1.0}, {10.0, 25.0},
                       {10.0, 49.0}, {14.0, 0.25}}) {
    const TruncNormalSpec t(m, s2, 0.0, 30.0);
    const oracle::TruncNormalQuad q(m, s2, 0.0, 30.0);
    EXPECT_NEAR(t.mean(), q.mean(), 1e-8);
    EXPECT_NEAR(t.variance(), q.var(), 1e-7);
    for (double a : {0.5, 0.9, 0.99}) EXPECT_NEAR(t.avar(a), q.avar(a), 1e-6);
    for (double p : {0.01, 0.5, 0.97}) EXPECT_NEAR(t.cdf(t.quantile(p)), p, 1e-12);
  }
}

TEST(TruncNormal, RejectsBadParameters) {
  EXPECT_THROW(TruncNormalSpec(0.0, 0.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(TruncNormalSpec(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(TruncNormalSpec(0.0, 1.0, 100.0, 101.0), std::invalid_argument);
}

TEST(TruncNormal, SampleMomentsAndDeterminism) {
  const TruncNormalSpec a(10.0, 1.0, 0.0, 30.0), b(14.0, 0.25, 0.0, 30.0);
  RngStream s1(5, 1), s2(5, 2);
  const auto x = truncnorm_sample(a, s1, 1000000);
  const auto y = truncnorm_sample(b, s2, 1000000);
  EXPECT_NEAR(oracle::mean(x), 10.0, 0.01);
  EXPECT_NEAR(oracle::sd(y), 0.5, 0.01);
  for (double v : x) ASSERT_TRUE(v >= 0.0 && v <= 30.0);
  RngStream s3(5, 1);
  const auto again = truncnorm_sample(a, s3, 1000);
  EXPECT_TRUE(std::equal(again.begin(), again.end(), x.begin()));
}

TEST(Bernoulli, ExtremesAndMeans) {
  RngStream s(9, 0);
  const auto ones = bernoulli_vector_sample(BernoulliVectorSpec(std::vector<double>(4, 1.0)), s, 50);
  for (double v : ones.data()) ASSERT_EQ(v, 1.0);
  const auto minus =
      bernoulli_vector_sample(BernoulliVectorSpec(std::vector<double>(4, 0.0)), s, 50);
  for (double v : minus.data()) ASSERT_EQ(v, -1.0);
  const std::size_t n = 100000;
  const auto half = bernoulli_vector_sample(BernoulliVectorSpec(std::vector<double>(3, 0.5)), s, n);
  ASSERT_EQ(half.rows(), n);
  ASSERT_EQ(half.cols(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += half.row(i)[j];
    EXPECT_NEAR(sum / n, 0.0, 0.02);
  }
  EXPECT_THROW(BernoulliVectorSpec({0.5, 1.2}), std::invalid_argument);
}

TEST(Bernoulli, UniformProbabilitiesScale) {
  RngStream a(3, 0), b(3, 0);
  const auto p = uniform_probabilities(a, 500, 1.0);
  const auto q = uniform_probabilities(b, 500, 0.8);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(q[i], 0.8 * p[i]);
    EXPECT_TRUE(p[i] > 0.0 && p[i] < 1.0);
  }
}
