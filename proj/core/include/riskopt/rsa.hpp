// Robust stochastic approximation (projected stochastic subgradient with a
// constant step and uniform averaging) and the nonasymptotic bounds
//
//   Low = Gbar - b(theta2, N) - a(theta3, N),   Up = Gbar + a(theta1, N),
//   a(t, N) = t M1 / sqrt(N),   b(t, N) = (K1 + t (K2 - M1)) / sqrt(N).
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "riskopt/confidence.hpp"
#include "riskopt/program.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/samplers.hpp"

namespace riskopt {

struct Thetas {
  double theta1 = 0.0;  ///< 2 sqrt(ln(2 / beta))
  double theta2 = 0.0;  ///< root of exp(1 - t^2) + exp(-t^2 / 4) = beta / 4
  double theta3 = 0.0;  ///< 2 sqrt(ln(4 / beta))
  double beta = 0.0;
};

/// Throws std::domain_error unless 0 < beta < 1.
Thetas compute_thetas(double beta);

struct RsaConstants {
  double L = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double D = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;

  /// Fills K1, K2. Throws std::invalid_argument on negative or non-finite
  /// input. M2 = L = 0 (objective independent of the decision) gives step 0.
  static RsaConstants make(double L, double M1, double M2, double D);

  double a(double theta, std::size_t n) const;
  double b(double theta, std::size_t n) const;
  /// gamma = D / sqrt(N (M2^2 + L^2)).
  double step(std::size_t n) const;
  /// Up - Low, which does not depend on the sample.
  double width(const Thetas& th, std::size_t n) const;
};

/// [Gbar - b(theta2) - a(theta3), Gbar + a(theta1)] at level 1 - beta.
ConfidenceInterval bounds(double g_bar, const RsaConstants& c, const Thetas& th,
                          std::size_t n);

/// What is known about G(x, xi) over X x Xi for the constants of a
/// risk-averse program.
struct LossBounds {
  double m0 = 0.0;  ///< min G
  double M0 = 0.0;  ///< max G
  /// min_x E[G_x], max_x E[G_x], max_x Var(G_x); when absent the tau box is
  /// the support [m0, M0].
  std::optional<double> mean_min;
  std::optional<double> mean_max;
  std::optional<double> var_max;
  /// Componentwise a.s. bounds m <= G'_x(x, xi) <= M (empty when dim X = 0).
  std::vector<double> sub_lo;
  std::vector<double> sub_hi;
  double diameter_x = 0.0;  ///< D(X)
};

struct RiskProgramConstants {
  RsaConstants constants;
  std::vector<double> tau_lo;
  std::vector<double> tau_hi;
};

/// L, M1, M2 for  min E[H(x, tau, xi)]  over X x [tau_lo, tau_hi], with
/// D = sqrt(D(X)^2 + ||tau_hi - tau_lo||^2).
RiskProgramConstants constants_risk_program(const RiskSpec& spec,
                                            const LossBounds& bounds);

/// The closed forms used for a scalar loss on [a0, b0] (X a singleton):
/// L = w1 max(1, alpha/(1-alpha)), M2 = w1/(1-alpha),
/// M1 = w0 (b0 - a0) + w1/(1-alpha) (b0 - tau_lo). D is supplied by the caller.
RsaConstants scalar_case_constants(const RiskSpec& spec, double a0, double b0,
                                   double tau_lo, double diameter);

/// Constants of the Bernoulli portfolio program (+-1 entries, simplex):
/// L = sqrt((w1 alpha/(1-alpha))^2 + n c^2) + 2 lambda0,
/// M2 = sqrt((w1/(1-alpha))^2 + 4 n c^2), M1 = 2 c, c = w0 + w1/(1-alpha),
/// and D the largest distance from the start (0, barycenter).
RsaConstants portfolio_constants(const RiskSpec& spec, std::size_t n,
                                 double lambda0);

struct RsaOptions {
  /// Risk-averse run: the state is (x, tau) and H is phi(G, tau). Without a
  /// spec the run minimizes E[G] directly.
  std::optional<RiskSpec> spec;
  /// Box for tau; defaults to program.tau_range(), which must then exist.
  std::vector<double> tau_lo;
  std::vector<double> tau_hi;
  bool keep_trajectory = false;
};

struct RsaRun {
  double g_bar = 0.0;              ///< N^{-1} sum_t H(x_t, tau_t, xi_t), shift included
  std::vector<double> draws;       ///< H(x_t, tau_t, xi_t) without the shift
  std::vector<double> x_avg;       ///< averaged iterate (x block)
  std::vector<double> tau_avg;
  std::vector<std::vector<double>> trajectory;  ///< (x_t; tau_t) when kept
};

/// One pass over `sample` (row t is xi_t), t = 1..N, with the constant step
/// constants.step(N). Throws std::invalid_argument on an empty sample.
RsaRun run_rsa(const StochasticProgram& program, const RsaConstants& constants,
               const ScenarioMatrix& sample, const RsaOptions& options = {});

}  // namespace riskopt
