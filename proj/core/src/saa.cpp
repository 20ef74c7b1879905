#include "riskopt/saa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "riskopt/statfun.hpp"

namespace riskopt {
namespace {

constexpr std::size_t kModelProbe = 10;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// argmin over the real line of  w (t + c mean_j [z_j - t]_+) + ridge t^2,
// ridge > 0, with z sorted ascending.
double ridge_tau(std::span<const double> z, double w, double c, double ridge) {
  const double n = static_cast<double>(z.size());
  // Right derivative at t with r points strictly above t.
  auto slope = [&](double t, std::size_t above) {
    return w * (1.0 - c * static_cast<double>(above) / n) + 2.0 * ridge * t;
  };
  std::size_t j = 0;  // number of points <= current breakpoint
  double left = -std::numeric_limits<double>::infinity();
  while (true) {
    const std::size_t above = z.size() - j;
    const double right =
        j < z.size() ? z[j] : std::numeric_limits<double>::infinity();
    // Stationary point of the quadratic piece on (left, right).
    const double t = -w * (1.0 - c * static_cast<double>(above) / n) / (2.0 * ridge);
    if (t > left && t < right) return t;
    if (j == z.size()) return t;  // unreachable for a convex piecewise quadratic
    // Breakpoint z[j]: the subdifferential spans slopes with `above` and
    // `above - ties` points to the right.
    std::size_t k = j;
    while (k < z.size() && z[k] == right) ++k;
    if (slope(right, above) <= 0.0 && slope(right, z.size() - k) >= 0.0) {
      return right;
    }
    left = right;
    j = k;
  }
}

struct Evaluation {
  double value = 0.0;  // without shift
  std::vector<double> tau;
  std::vector<double> weights;  // phi slope / N per scenario
};

Evaluation evaluate(const StochasticProgram& program, const RiskSpec& spec,
                    const ScenarioMatrix& sample, std::span<const double> x,
                    std::vector<double>& z) {
  const std::size_t n = sample.rows();
  program.losses(x, sample, z);
  Interval range;
  if (auto r = program.tau_range()) {
    range = *r;
  } else {
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    range = {*lo, *hi};
  }
  Evaluation ev;
  ev.tau = optimal_tau(z, spec, program.ridge(), range);
  const double nd = static_cast<double>(n);

  // Scenarios with z_j == tau_i sit on the kink of [z - tau_i]_+. The x-part of
  // a subgradient of min_tau Phi(x, tau) must come with a zero tau-part, so
  // the tied scenarios take the fraction of the kink slope that makes tau_i
  // stationary (taking the full slope can give a cut above F).
  std::vector<double> tie_share(spec.k(), 1.0);
  for (std::size_t i = 0; i < spec.k(); ++i) {
    const double w = spec.avar_weight(i);
    if (w == 0.0) continue;
    std::size_t above = 0, ties = 0;
    for (double v : z) {
      above += v > ev.tau[i];
      ties += v == ev.tau[i];
    }
    if (ties == 0) continue;
    const double c = 1.0 / (1.0 - spec.level(i));
    // w (1 - c (above + s ties) / N) + 2 ridge tau = 0
    const double s =
        ((1.0 + 2.0 * program.ridge() * ev.tau[i] / w) * nd / c - static_cast<double>(above)) /
        static_cast<double>(ties);
    tie_share[i] = std::clamp(s, 0.0, 1.0);
  }

  ev.weights.resize(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += phi(z[j], spec, ev.tau);
    double slope = spec.w0();
    for (std::size_t i = 0; i < spec.k(); ++i) {
      const double kink = spec.avar_weight(i) / (1.0 - spec.level(i));
      if (z[j] > ev.tau[i]) {
        slope += kink;
      } else if (z[j] == ev.tau[i]) {
        slope += tie_share[i] * kink;
      }
    }
    ev.weights[j] = slope / nd;
  }
  ev.value = total / static_cast<double>(n) +
             program.ridge() * (dot(x, x) + dot(ev.tau, ev.tau));
  return ev;
}

}  // namespace

std::vector<double> optimal_tau(std::span<const double> z, const RiskSpec& spec,
                                double ridge, Interval range) {
  std::vector<double> tau(spec.k(), 0.0);
  if (spec.k() == 0) return tau;
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < spec.k(); ++i) {
    const double w = spec.avar_weight(i);
    const double alpha = spec.level(i);
    double t;
    if (ridge > 0.0) {
      t = w > 0.0 ? ridge_tau(sorted, w, 1.0 / (1.0 - alpha), ridge) : 0.0;
    } else {
      t = sorted[left_quantile_rank(alpha, sorted.size()) - 1];
    }
    tau[i] = std::clamp(t, range.low, range.high);
  }
  return tau;
}

SolveReport solve_saa(const StochasticProgram& program, const RiskSpec& spec,
                      const ScenarioMatrix& sample, const SaaOptions& options) {
  const std::size_t n = sample.rows();
  if (n == 0) throw std::invalid_argument("solve_saa: empty sample");
  if (sample.cols() != program.scenario_dim()) {
    throw std::invalid_argument("solve_saa: scenario dimension mismatch");
  }
  const std::size_t d = program.dim();
  const double ridge = program.ridge();
  const double mu = 2.0 * ridge;  // strong convexity modulus in x

  SolveReport report;
  report.n = n;
  std::vector<double> z(n);
  std::vector<double> x = program.start_point();
  program.project(x);

  Evaluation ev = evaluate(program, spec, sample, x, z);
  double best = ev.value;
  std::vector<double> best_x = x;
  std::vector<double> best_tau = ev.tau;
  double lower = d == 0 ? best : -std::numeric_limits<double>::infinity();

  const std::size_t max_it =
      options.max_iterations > 0
          ? options.max_iterations
          : static_cast<std::size_t>(
                std::ceil(50.0 * std::sqrt(static_cast<double>(n)) *
                          static_cast<double>(std::max<std::size_t>(d, 1))));
  auto tolerance = [&](double v) {
    return options.tol > 0.0 ? options.tol : 1e-6 * (1.0 + std::abs(v));
  };

  // Aggregated lower model  (C + A^T y) / W + mu/2 ||y||^2  built from the
  // cuts F(x_t) + g_t^T (y - x_t) + mu/2 ||y - x_t||^2, weighted by t.
  std::vector<double> agg_a(d, 0.0);
  double agg_c = 0.0;
  double agg_w = 0.0;
  std::vector<double> g(d), y(d);

  std::size_t it = 0;
  while (d > 0 && it < max_it) {
    ++it;
    program.weighted_subgradient(x, sample, ev.weights, g);
    for (std::size_t i = 0; i < d; ++i) g[i] += mu * x[i];

    const double wt = static_cast<double>(it);
    const double gx = dot(g, x);
    const double xx = dot(x, x);
    for (std::size_t i = 0; i < d; ++i) agg_a[i] += wt * (g[i] - mu * x[i]);
    agg_c += wt * (ev.value - gx + 0.5 * mu * xx);
    agg_w += wt;
    double model_min;
    if (mu > 0.0) {
      for (std::size_t i = 0; i < d; ++i) y[i] = -agg_a[i] / (agg_w * mu);
      program.project(y);
      model_min = (agg_c + dot(agg_a, y)) / agg_w + 0.5 * mu * dot(y, y);
    } else {
      model_min = (agg_c + program.linear_min(agg_a)) / agg_w;
    }
    lower = std::max(lower, model_min);
    // The model minimizer is a dual-averaging iterate; with a ridge term it
    // approaches x* much faster than the subgradient iterates themselves.
    if (mu > 0.0 && it % kModelProbe == 0) {
      Evaluation ey = evaluate(program, spec, sample, y, z);
      if (ey.value < best) {
        best = ey.value;
        best_x = y;
        best_tau = std::move(ey.tau);
      }
    }
    if (best - lower <= tolerance(best)) break;

    const double gg = dot(g, g);
    if (gg == 0.0) {
      lower = best;  // x is optimal
      break;
    }
    // Polyak step towards the certified lower bound.
    const double step = (ev.value - lower) / gg;
    for (std::size_t i = 0; i < d; ++i) x[i] -= step * g[i];
    program.project(x);

    ev = evaluate(program, spec, sample, x, z);
    if (ev.value < best) {
      best = ev.value;
      best_x = x;
      best_tau = ev.tau;
    }
  }

  report.iterations = it;
  report.value = best + program.shift();
  report.x_hat = std::move(best_x);
  report.tau_hat = std::move(best_tau);
  report.objective_gap = d == 0 ? 0.0 : std::max(0.0, best - lower);
  report.converged = report.objective_gap <= tolerance(best);
  if (!report.converged) {
    report.warnings.push_back("iteration cap reached before the gap closed");
  }
  if (d > 0 && ridge == 0.0) {
    report.warnings.push_back(
        "no ridge term: the SAA minimizer may not be unique and the variance "
        "estimate assumes it is");
  }
  if (n >= 2) {
    report.nu_hat = variance_estimate(report, program, spec, sample);
  } else {
    report.warnings.push_back("one scenario: variance estimate unavailable");
  }
  return report;
}

double variance_estimate(const SolveReport& report, const StochasticProgram& program,
                         const RiskSpec& spec, const ScenarioMatrix& sample) {
  const std::size_t n = sample.rows();
  if (n < 2) {
    throw std::invalid_argument("variance_estimate: need at least two scenarios");
  }
  std::vector<double> z(n);
  program.losses(report.x_hat, sample, z);
  for (double& v : z) v = phi(v, spec, report.tau_hat);
  return sample_sd(z);
}

ConfidenceInterval asymptotic_ci(const SolveReport& report, double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::domain_error("asymptotic_ci: beta must lie in (0, 1)");
  }
  const double half = normal_quantile(1.0 - beta / 2.0) * report.nu_hat /
                      std::sqrt(static_cast<double>(report.n));
  return {report.value - half, report.value + half, 1.0 - beta,
          CiMethod::kAsymptotic};
}

std::string_view to_string(CiMethod m) {
  return m == CiMethod::kAsymptotic ? "asymptotic" : "rsa";
}

}  // namespace riskopt
