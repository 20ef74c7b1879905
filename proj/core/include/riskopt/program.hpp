// Convex stochastic programs  min_{x in X} R(G(x, xi)) + ridge ||(x, tau)||^2 + shift.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "riskopt/risk.hpp"
#include "riskopt/samplers.hpp"

namespace riskopt {

class StochasticProgram {
 public:
  virtual ~StochasticProgram() = default;

  /// Dimension of x; 0 means X is a single point.
  virtual std::size_t dim() const = 0;
  virtual std::size_t scenario_dim() const = 0;

  /// G(x, xi), convex in x for every xi.
  virtual double loss(std::span<const double> x,
                      std::span<const double> xi) const = 0;
  /// Writes one element of the subdifferential of G(., xi) at x.
  virtual void loss_subgradient(std::span<const double> x,
                                std::span<const double> xi,
                                std::span<double> g) const = 0;
  /// Euclidean projection onto X, in place.
  virtual void project(std::span<double> x) const = 0;
  virtual std::vector<double> start_point() const = 0;
  /// Largest distance from start_point() to a point of X.
  virtual double diameter() const = 0;
  /// min_{y in X} c^T y.
  virtual double linear_min(std::span<const double> c) const = 0;

  /// Coefficient lambda0 of lambda0 (||x||^2 + ||tau||^2).
  virtual double ridge() const { return 0.0; }
  /// Deterministic constant c0 added to the objective.
  virtual double shift() const { return 0.0; }
  /// Box every tau_i is restricted to, when the program imposes one.
  virtual std::optional<Interval> tau_range() const { return std::nullopt; }

  /// out[j] = G(x, xi_j) for every scenario row.
  virtual void losses(std::span<const double> x, const ScenarioMatrix& sample,
                      std::span<double> out) const;
  /// g = sum_j weights[j] * dG(x, xi_j).
  virtual void weighted_subgradient(std::span<const double> x,
                                    const ScenarioMatrix& sample,
                                    std::span<const double> weights,
                                    std::span<double> g) const;
};

/// X = {x*}: G is the scenario's first coordinate. Plug-in estimation.
class ScalarLossProgram final : public StochasticProgram {
 public:
  std::size_t dim() const override { return 0; }
  std::size_t scenario_dim() const override { return 1; }
  double loss(std::span<const double>, std::span<const double> xi) const override {
    return xi[0];
  }
  void loss_subgradient(std::span<const double>, std::span<const double>,
                        std::span<double>) const override {}
  void project(std::span<double>) const override {}
  std::vector<double> start_point() const override { return {}; }
  double diameter() const override { return 0.0; }
  double linear_min(std::span<const double>) const override { return 0.0; }
};

/// min w0 E[xi^T x] + w1 (x0 + E[xi^T x - x0]_+ / (1 - alpha))
///     + lambda0 ||(x0, x)||^2 + c0   over the unit simplex, x0 in [-1, 1].
/// x0 plays the role of tau; G(x, xi) = xi^T x.
class PortfolioProgram final : public StochasticProgram {
 public:
  PortfolioProgram(std::size_t n, double lambda0, double c0);

  std::size_t dim() const override { return n_; }
  std::size_t scenario_dim() const override { return n_; }
  double loss(std::span<const double> x, std::span<const double> xi) const override;
  void loss_subgradient(std::span<const double> x, std::span<const double> xi,
                        std::span<double> g) const override;
  void project(std::span<double> x) const override;
  std::vector<double> start_point() const override;
  double diameter() const override;
  double linear_min(std::span<const double> c) const override;
  double ridge() const override { return lambda0_; }
  double shift() const override { return c0_; }
  std::optional<Interval> tau_range() const override { return Interval{-1.0, 1.0}; }

  void losses(std::span<const double> x, const ScenarioMatrix& sample,
              std::span<double> out) const override;
  void weighted_subgradient(std::span<const double> x, const ScenarioMatrix& sample,
                            std::span<const double> weights,
                            std::span<double> g) const override;

 private:
  std::size_t n_;
  double lambda0_;
  double c0_;
};

/// The risk-neutral rewriting  min_{tau in [a0, b0]^k} E[phi(xi, tau)]  of a
/// risk value R(xi) for a loss supported on [a0, b0]. x is tau itself.
class TauReformulation final : public StochasticProgram {
 public:
  TauReformulation(RiskSpec spec, double a0, double b0);

  std::size_t dim() const override { return spec_.k(); }
  std::size_t scenario_dim() const override { return 1; }
  double loss(std::span<const double> tau, std::span<const double> xi) const override;
  void loss_subgradient(std::span<const double> tau, std::span<const double> xi,
                        std::span<double> g) const override;
  void project(std::span<double> tau) const override;
  std::vector<double> start_point() const override;
  double diameter() const override;
  double linear_min(std::span<const double> c) const override;

 private:
  RiskSpec spec_;
  double a0_, b0_;
};

/// Euclidean projection onto {x >= 0, sum x = 1} (sort and threshold).
void project_simplex(std::span<double> x);

}  // namespace riskopt
