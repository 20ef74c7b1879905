#include "riskopt/program.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace riskopt {

void StochasticProgram::losses(std::span<const double> x,
                               const ScenarioMatrix& sample,
                               std::span<double> out) const {
  for (std::size_t j = 0; j < sample.rows(); ++j) out[j] = loss(x, sample.row(j));
}

void StochasticProgram::weighted_subgradient(std::span<const double> x,
                                             const ScenarioMatrix& sample,
                                             std::span<const double> weights,
                                             std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  std::vector<double> gj(g.size());
  for (std::size_t j = 0; j < sample.rows(); ++j) {
    if (weights[j] == 0.0) continue;
    loss_subgradient(x, sample.row(j), gj);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += weights[j] * gj[i];
  }
}

void project_simplex(std::span<double> x) {
  if (x.empty()) return;
  std::vector<double> u(x.begin(), x.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& v : x) v = std::max(0.0, v - theta);
}

PortfolioProgram::PortfolioProgram(std::size_t n, double lambda0, double c0)
    : n_(n), lambda0_(lambda0), c0_(c0) {
  if (n == 0) throw std::invalid_argument("PortfolioProgram: n must be >= 1");
  if (!(lambda0 >= 0.0)) {
    throw std::invalid_argument("PortfolioProgram: lambda0 must be >= 0");
  }
}

double PortfolioProgram::loss(std::span<const double> x,
                              std::span<const double> xi) const {
  return std::inner_product(x.begin(), x.end(), xi.begin(), 0.0);
}

void PortfolioProgram::loss_subgradient(std::span<const double>,
                                        std::span<const double> xi,
                                        std::span<double> g) const {
  std::copy(xi.begin(), xi.end(), g.begin());
}

void PortfolioProgram::project(std::span<double> x) const { project_simplex(x); }

std::vector<double> PortfolioProgram::start_point() const {
  return std::vector<double>(n_, 1.0 / static_cast<double>(n_));
}

double PortfolioProgram::diameter() const {
  // barycenter to a vertex
  return std::sqrt(1.0 - 1.0 / static_cast<double>(n_));
}

double PortfolioProgram::linear_min(std::span<const double> c) const {
  return *std::min_element(c.begin(), c.end());
}

void PortfolioProgram::losses(std::span<const double> x,
                              const ScenarioMatrix& sample,
                              std::span<double> out) const {
  const std::size_t n = n_;
  const double* data = sample.data().data();
  for (std::size_t j = 0; j < sample.rows(); ++j) {
    const double* row = data + j * n;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += row[i] * x[i];
    out[j] = s;
  }
}

void PortfolioProgram::weighted_subgradient(std::span<const double>,
                                            const ScenarioMatrix& sample,
                                            std::span<const double> weights,
                                            std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  const std::size_t n = n_;
  const double* data = sample.data().data();
  for (std::size_t j = 0; j < sample.rows(); ++j) {
    const double w = weights[j];
    if (w == 0.0) continue;
    const double* row = data + j * n;
    for (std::size_t i = 0; i < n; ++i) g[i] += w * row[i];
  }
}

TauReformulation::TauReformulation(RiskSpec spec, double a0, double b0)
    : spec_(std::move(spec)), a0_(a0), b0_(b0) {
  if (!(a0 < b0)) throw std::invalid_argument("TauReformulation: need a0 < b0");
}

double TauReformulation::loss(std::span<const double> tau,
                              std::span<const double> xi) const {
  return phi(xi[0], spec_, tau);
}

void TauReformulation::loss_subgradient(std::span<const double> tau,
                                        std::span<const double> xi,
                                        std::span<double> g) const {
  for (std::size_t i = 0; i < spec_.k(); ++i) {
    const double c = 1.0 / (1.0 - spec_.level(i));
    g[i] = spec_.avar_weight(i) * (1.0 - (xi[0] >= tau[i] ? c : 0.0));
  }
}

void TauReformulation::project(std::span<double> tau) const {
  for (double& t : tau) t = std::clamp(t, a0_, b0_);
}

std::vector<double> TauReformulation::start_point() const {
  return std::vector<double>(spec_.k(), 0.5 * (a0_ + b0_));
}

double TauReformulation::diameter() const {
  return 0.5 * (b0_ - a0_) * std::sqrt(static_cast<double>(spec_.k()));
}

double TauReformulation::linear_min(std::span<const double> c) const {
  double v = 0.0;
  for (double ci : c) v += std::min(ci * a0_, ci * b0_);
  return v;
}

}  // namespace riskopt
