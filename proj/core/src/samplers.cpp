#include "riskopt/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskopt/statfun.hpp"

namespace riskopt {

TruncNormalSpec::TruncNormalSpec(double m, double s2, double a0, double b0)
    : m_(m), s2_(s2), sd_(std::sqrt(s2)), a0_(a0), b0_(b0) {
  if (!(s2 > 0.0) || !std::isfinite(s2)) {
    throw std::invalid_argument("TruncNormalSpec: variance must be positive");
  }
  if (!(a0 < b0)) {
    throw std::invalid_argument("TruncNormalSpec: need a0 < b0");
  }
  const double za = (a0 - m) / sd_;
  const double zb = (b0 - m) / sd_;
  // Work in whichever tail keeps the bounds' cdf values away from 1.
  reflect_ = za > -zb;
  if (reflect_) {
    lo_cdf_ = normal_cdf(-zb);
    hi_cdf_ = normal_cdf(-za);
  } else {
    lo_cdf_ = normal_cdf(za);
    hi_cdf_ = normal_cdf(zb);
  }
  if (!(hi_cdf_ > lo_cdf_)) {
    throw std::invalid_argument("TruncNormalSpec: no mass on [a0, b0]");
  }
}

double TruncNormalSpec::cdf(double x) const {
  if (x <= a0_) return 0.0;
  if (x >= b0_) return 1.0;
  const double z = (x - m_) / sd_;
  const double mass = hi_cdf_ - lo_cdf_;
  if (reflect_) return (hi_cdf_ - normal_cdf(-z)) / mass;
  return (normal_cdf(z) - lo_cdf_) / mass;
}

double TruncNormalSpec::quantile(double u) const {
  const double mass = hi_cdf_ - lo_cdf_;
  double x;
  if (reflect_) {
    x = m_ - sd_ * normal_quantile(hi_cdf_ - u * mass);
  } else {
    x = m_ + sd_ * normal_quantile(lo_cdf_ + u * mass);
  }
  return std::clamp(x, a0_, b0_);
}

double TruncNormalSpec::mean() const {
  const double za = (a0_ - m_) / sd_;
  const double zb = (b0_ - m_) / sd_;
  const double mass = hi_cdf_ - lo_cdf_;
  return m_ + sd_ * (normal_pdf(za) - normal_pdf(zb)) / mass;
}

double TruncNormalSpec::variance() const {
  const double za = (a0_ - m_) / sd_;
  const double zb = (b0_ - m_) / sd_;
  const double mass = hi_cdf_ - lo_cdf_;
  const double pa = normal_pdf(za);
  const double pb = normal_pdf(zb);
  const double r = (pa - pb) / mass;
  return s2_ * (1.0 + (za * pa - zb * pb) / mass - r * r);
}

double TruncNormalSpec::avar(double alpha) const {
  if (!(alpha >= 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("TruncNormalSpec::avar: alpha must lie in [0, 1)");
  }
  if (alpha == 0.0) return mean();
  // The upper tail above the alpha-quantile is N(m, s2) truncated to [q, b0].
  const double q = quantile(alpha);
  const double zq = (q - m_) / sd_;
  const double zb = (b0_ - m_) / sd_;
  const double tail_mass = (1.0 - alpha) * (hi_cdf_ - lo_cdf_);
  return m_ + sd_ * (normal_pdf(zq) - normal_pdf(zb)) / tail_mass;
}

double truncnorm_cdf(const TruncNormalSpec& spec, double x) { return spec.cdf(x); }

std::vector<double> truncnorm_sample(const TruncNormalSpec& spec,
                                     RngStream& stream, std::size_t count) {
  std::vector<double> out(count);
  for (double& v : out) v = spec.quantile(stream.uniform_open());
  return out;
}

ScenarioMatrix::ScenarioMatrix(std::size_t rows, std::size_t cols,
                               std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("ScenarioMatrix: data size mismatch");
  }
}

ScenarioMatrix ScenarioMatrix::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return ScenarioMatrix(n, 1, std::move(values));
}

BernoulliVectorSpec::BernoulliVectorSpec(std::vector<double> psi)
    : psi_(std::move(psi)) {
  for (double p : psi_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("BernoulliVectorSpec: psi must lie in [0, 1]");
    }
  }
}

ScenarioMatrix bernoulli_vector_sample(const BernoulliVectorSpec& spec,
                                       RngStream& stream, std::size_t count) {
  ScenarioMatrix out(count, spec.size());
  const auto psi = spec.psi();
  for (std::size_t j = 0; j < count; ++j) {
    auto row = out.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = stream.uniform_open() < psi[i] ? 1.0 : -1.0;
    }
  }
  return out;
}

std::vector<double> uniform_probabilities(RngStream& stream, std::size_t n,
                                          double scale) {
  std::vector<double> psi(n);
  for (double& p : psi) p = scale * stream.uniform_open();
  return psi;
}

}  // namespace riskopt
