// Sample average approximation of  min_x R(G(x, xi))  for a discrete-Kusuoka R
// with a single weight vector, its variance estimate and asymptotic interval.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskopt/confidence.hpp"
#include "riskopt/program.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/samplers.hpp"

namespace riskopt {

struct SaaOptions {
  /// Stop once the certified gap is below tol; <= 0 selects 1e-6 (1 + |value|).
  double tol = 0.0;
  /// 0 selects 50 sqrt(N) dim.
  std::size_t max_iterations = 0;
};

struct SolveReport {
  double value = 0.0;              ///< v_N, includes ridge and shift
  std::vector<double> x_hat;
  std::vector<double> tau_hat;
  double nu_hat = 0.0;             ///< sd of phi(G(x_hat, xi_j), tau_hat)
  std::size_t n = 0;
  std::size_t iterations = 0;
  double objective_gap = 0.0;      ///< value - certified lower bound
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Exact minimizer over tau_i (restricted to `range`) of
///   w_i (tau_i + mean_j [z_j - tau_i]_+ / (1 - alpha_i)) + ridge tau_i^2
/// for each level. With ridge == 0 this is the left alpha_i-quantile of z.
std::vector<double> optimal_tau(std::span<const double> z, const RiskSpec& spec,
                                double ridge, Interval range);

/// Solves the SAA problem on `sample` (one scenario per row).
SolveReport solve_saa(const StochasticProgram& program, const RiskSpec& spec,
                      const ScenarioMatrix& sample, const SaaOptions& options = {});

/// nu_N: unbiased sd of phi(G(x_hat, xi_j), tau_hat) over the sample.
/// Throws std::invalid_argument for fewer than two scenarios.
double variance_estimate(const SolveReport& report, const StochasticProgram& program,
                         const RiskSpec& spec, const ScenarioMatrix& sample);

/// v_N -+ Phi^{-1}(1 - beta/2) nu_N / sqrt(N).
ConfidenceInterval asymptotic_ci(const SolveReport& report, double beta);

}  // namespace riskopt
