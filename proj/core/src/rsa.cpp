#include "riskopt/rsa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riskopt {
namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

Thetas compute_thetas(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::domain_error("compute_thetas: beta must lie in (0, 1)");
  }
  Thetas th;
  th.beta = beta;
  th.theta1 = 2.0 * std::sqrt(std::log(2.0 / beta));
  th.theta3 = 2.0 * std::sqrt(std::log(4.0 / beta));
  // f is decreasing on [0, inf) from e + 1 to 0; beta/4 < 1/4 is always bracketed.
  auto f = [beta](double t) {
    return std::exp(1.0 - t * t) + std::exp(-t * t / 4.0) - beta / 4.0;
  };
  double lo = 0.0, hi = 20.0;
  if (!(f(lo) > 0.0 && f(hi) < 0.0)) {
    throw std::domain_error("compute_thetas: theta2 equation has no root in [0, 20]");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  th.theta2 = 0.5 * (lo + hi);
  return th;
}

RsaConstants RsaConstants::make(double L, double M1, double M2, double D) {
  if (!finite_nonneg(L) || !finite_nonneg(M1) || !finite_nonneg(M2) ||
      !finite_nonneg(D)) {
    throw std::invalid_argument("RsaConstants: constants must be finite and >= 0");
  }
  RsaConstants c{L, M1, M2, D, 0.0, 0.0};
  // L = M2 = 0: the objective does not depend on the decision (e.g. w1 = 0
  // in the scalar case), the step is irrelevant and only M1 remains.
  const double root = std::sqrt(2.0 * (M2 * M2 + L * L));
  c.K1 = root > 0.0 ? D * (M2 * M2 + 2.0 * L * L) / root : 0.0;
  c.K2 = (root > 0.0 ? D * M2 * M2 / root : 0.0) + 2.0 * D * M2 + M1;
  return c;
}

double RsaConstants::a(double theta, std::size_t n) const {
  return theta * M1 / std::sqrt(static_cast<double>(n));
}

double RsaConstants::b(double theta, std::size_t n) const {
  return (K1 + theta * (K2 - M1)) / std::sqrt(static_cast<double>(n));
}

double RsaConstants::step(std::size_t n) const {
  if (M2 == 0.0 && L == 0.0) return 0.0;
  return D / std::sqrt(static_cast<double>(n) * (M2 * M2 + L * L));
}

double RsaConstants::width(const Thetas& th, std::size_t n) const {
  return a(th.theta1, n) + b(th.theta2, n) + a(th.theta3, n);
}

ConfidenceInterval bounds(double g_bar, const RsaConstants& c, const Thetas& th,
                          std::size_t n) {
  if (n == 0) throw std::invalid_argument("bounds: N must be >= 1");
  return {g_bar - c.b(th.theta2, n) - c.a(th.theta3, n), g_bar + c.a(th.theta1, n),
          1.0 - th.beta, CiMethod::kRsa};
}

RiskProgramConstants constants_risk_program(const RiskSpec& spec,
                                            const LossBounds& lb) {
  if (!std::isfinite(lb.m0) || !std::isfinite(lb.M0) || lb.m0 > lb.M0) {
    throw std::invalid_argument("constants_risk_program: need finite m0 <= M0");
  }
  if (lb.sub_lo.size() != lb.sub_hi.size()) {
    throw std::invalid_argument("constants_risk_program: subgradient bound sizes differ");
  }
  const bool moments = lb.mean_min && lb.mean_max && lb.var_max;
  if (moments && (!std::isfinite(*lb.mean_min) || !std::isfinite(*lb.mean_max) ||
                  !finite_nonneg(*lb.var_max))) {
    throw std::invalid_argument("constants_risk_program: moment bounds must be finite");
  }

  RiskProgramConstants out;
  const std::size_t k = spec.k();
  out.tau_lo.resize(k);
  out.tau_hi.resize(k);
  double M1 = spec.w0() * (lb.M0 - lb.m0);
  double spread2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = spec.level(i);
    if (moments) {
      const double sd = std::sqrt(*lb.var_max);
      out.tau_lo[i] = *lb.mean_min - std::sqrt((1.0 - a) / a) * sd;
      out.tau_hi[i] = *lb.mean_max + std::sqrt(a / (1.0 - a)) * sd;
    } else {
      out.tau_lo[i] = lb.m0;
      out.tau_hi[i] = lb.M0;
    }
    M1 += spec.avar_weight(i) / (1.0 - a) * (lb.M0 - out.tau_lo[i]);
    spread2 += std::pow(out.tau_hi[i] - out.tau_lo[i], 2);
  }

  double tail = 0.0;  // sum_i w_i / (1 - alpha_i)
  for (std::size_t i = 0; i < k; ++i) tail += spec.avar_weight(i) / (1.0 - spec.level(i));
  double L2 = 0.0, M22 = 0.0;
  for (std::size_t j = 0; j < lb.sub_lo.size(); ++j) {
    const double aj = spec.w0() * lb.sub_hi[j] + tail * std::max(0.0, lb.sub_hi[j]);
    const double bj = spec.w0() * lb.sub_lo[j] + tail * std::min(0.0, lb.sub_lo[j]);
    L2 += std::max(aj * aj, bj * bj);
    M22 += (aj - bj) * (aj - bj);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double w = spec.avar_weight(i);
    const double a = spec.level(i);
    L2 += w * w * std::max(1.0, a * a / ((1.0 - a) * (1.0 - a)));
    M22 += std::pow(w / (1.0 - a), 2);
  }
  const double D = std::sqrt(lb.diameter_x * lb.diameter_x + spread2);
  out.constants = RsaConstants::make(std::sqrt(L2), M1, std::sqrt(M22), D);
  return out;
}

RsaConstants scalar_case_constants(const RiskSpec& spec, double a0, double b0,
                                   double tau_lo, double diameter) {
  if (spec.k() != 1) {
    throw std::invalid_argument("scalar_case_constants: needs exactly one AVaR level");
  }
  if (!(a0 < b0)) throw std::invalid_argument("scalar_case_constants: need a0 < b0");
  const double w0 = spec.w0();
  const double w1 = spec.avar_weight(0);
  const double a = spec.level(0);
  const double L = w1 * std::max(1.0, a / (1.0 - a));
  const double M2 = w1 / (1.0 - a);
  const double M1 = w0 * (b0 - a0) + w1 / (1.0 - a) * (b0 - tau_lo);
  return RsaConstants::make(L, M1, M2, diameter);
}

RsaConstants portfolio_constants(const RiskSpec& spec, std::size_t n,
                                 double lambda0) {
  if (spec.k() != 1 || n == 0) {
    throw std::invalid_argument("portfolio_constants: needs one AVaR level and n >= 1");
  }
  const double w0 = spec.w0();
  const double w1 = spec.avar_weight(0);
  const double a = spec.level(0);
  const double c = w0 + w1 / (1.0 - a);
  const double nd = static_cast<double>(n);
  const double L = std::sqrt(std::pow(w1 * a / (1.0 - a), 2) + nd * c * c) +
                   2.0 * lambda0;
  const double M2 = std::sqrt(std::pow(w1 / (1.0 - a), 2) + 4.0 * nd * c * c);
  // Farthest point of [-1, 1] x simplex from (0, 1/n, ..., 1/n): a vertex pair.
  const double D = std::sqrt(1.0 + (1.0 - 1.0 / nd));
  return RsaConstants::make(L, 2.0 * c, M2, D);
}

RsaRun run_rsa(const StochasticProgram& program, const RsaConstants& constants,
               const ScenarioMatrix& sample, const RsaOptions& options) {
  const std::size_t n = sample.rows();
  if (n == 0) throw std::invalid_argument("run_rsa: empty sample");
  if (sample.cols() != program.scenario_dim()) {
    throw std::invalid_argument("run_rsa: scenario dimension mismatch");
  }
  const std::size_t d = program.dim();
  const std::size_t k = options.spec ? options.spec->k() : 0;
  std::vector<double> tau_lo = options.tau_lo, tau_hi = options.tau_hi;
  if (k > 0 && tau_lo.empty()) {
    const auto r = program.tau_range();
    if (!r) throw std::invalid_argument("run_rsa: no tau box for a risk-averse run");
    tau_lo.assign(k, r->low);
    tau_hi.assign(k, r->high);
  }
  if (tau_lo.size() != k || tau_hi.size() != k) {
    throw std::invalid_argument("run_rsa: tau box must have k entries");
  }

  const double gamma = constants.step(n);
  const double ridge = program.ridge();
  std::vector<double> x = program.start_point();
  program.project(x);
  std::vector<double> tau(k);
  for (std::size_t i = 0; i < k; ++i) tau[i] = 0.5 * (tau_lo[i] + tau_hi[i]);

  RsaRun run;
  run.draws.reserve(n);
  run.x_avg.assign(d, 0.0);
  run.tau_avg.assign(k, 0.0);
  std::vector<double> gx(d);
  double total = 0.0;

  for (std::size_t t = 0; t < n; ++t) {
    if (options.keep_trajectory) {
      std::vector<double> state = x;
      state.insert(state.end(), tau.begin(), tau.end());
      run.trajectory.push_back(std::move(state));
    }
    for (std::size_t i = 0; i < d; ++i) run.x_avg[i] += x[i];
    for (std::size_t i = 0; i < k; ++i) run.tau_avg[i] += tau[i];

    const auto xi = sample.row(t);
    const double z = program.loss(x, xi);
    const double reg = ridge * (std::inner_product(x.begin(), x.end(), x.begin(), 0.0) +
                                std::inner_product(tau.begin(), tau.end(), tau.begin(), 0.0));
    const double h = (options.spec ? phi(z, *options.spec, tau) : z) + reg;
    run.draws.push_back(h);
    total += h;

    if (t + 1 == n) break;  // the last step would not be used
    const double slope = options.spec ? phi_slope(z, *options.spec, tau) : 1.0;
    program.loss_subgradient(x, xi, gx);
    for (std::size_t i = 0; i < d; ++i) x[i] -= gamma * (slope * gx[i] + 2.0 * ridge * x[i]);
    program.project(x);
    for (std::size_t i = 0; i < k; ++i) {
      const RiskSpec& spec = *options.spec;
      const double hit = z >= tau[i] ? 1.0 / (1.0 - spec.level(i)) : 0.0;
      const double g = spec.avar_weight(i) * (1.0 - hit) + 2.0 * ridge * tau[i];
      tau[i] = std::clamp(tau[i] - gamma * g, tau_lo[i], tau_hi[i]);
    }
  }

  const double nd = static_cast<double>(n);
  for (double& v : run.x_avg) v /= nd;
  for (double& v : run.tau_avg) v /= nd;
  run.g_bar = total / nd + program.shift();
  return run;
}

}  // namespace riskopt
