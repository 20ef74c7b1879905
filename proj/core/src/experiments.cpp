#include "riskopt/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "riskopt/hyptest.hpp"
#include "riskopt/parallel.hpp"
#include "riskopt/program.hpp"
#include "riskopt/rsa.hpp"
#include "riskopt/saa.hpp"

namespace riskopt {
namespace {

constexpr double kSupportLo = 0.0;
constexpr double kSupportHi = 30.0;

// Default columns. Entries above kDeskMaxN only run at paper scale.
const std::vector<std::size_t> kEstimateGrid = {20, 50, 100, 1000, 10000, 100000, 1000000};
const std::vector<std::size_t> kBoundGrid = {50, 1000, 10000, 100000, 150000};
const std::vector<std::size_t> kQpGrid = {20, 50, 100, 1000, 10000, 100000};

struct CaseGrids {
  std::vector<std::size_t> as_equality, na_equality, as_onesided, na_onesided;
};

CaseGrids case_grids(const std::string& id) {
  if (id == "I") {
    return {{20, 50, 100, 1000, 5000, 10000},
            {5000, 10000, 20000, 50000, 100000, 130000, 150000},
            {20, 50, 100, 1000, 5000, 10000},
            {5000, 10000, 20000, 50000, 100000, 130000, 150000}};
  }
  if (id == "II") {
    return {{20, 50, 100, 1000, 10000},
            {10000, 20000, 50000, 100000, 110000},
            {20, 50, 100, 1000, 10000},
            {10000, 20000, 50000, 100000, 110000}};
  }
  return {{20, 50, 100, 200, 500, 1000, 2000, 5000},
          {100000, 300000, 500000, 700000, 1000000, 5000000},
          {20, 100, 200, 1000, 5000, 10000, 30000, 50000},
          {100000, 300000, 400000, 500000, 700000, 900000, 2000000, 5000000}};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(s);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for '" + key + "': '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
      })) {
    throw ConfigError("bad non-negative integer for '" + key + "': '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range for '" + key + "': '" + v + "'");
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& f : split(v, ',')) out.push_back(parse_double(key, f));
  return out;
}

// Accepts 1e5-style entries as long as they are integral.
std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& f : split(v, ',')) {
    const double d = parse_double(key, f);
    if (d < 1.0 || d != std::floor(d) || d > 1e12) {
      throw ConfigError("'" + key + "' entries must be positive integers, got '" + f + "'");
    }
    out.push_back(static_cast<std::size_t>(d));
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt_d(double v) { return format_double(v); }
std::string fmt_z(std::size_t v) { return std::to_string(v); }
// Row labels: 1 - w0 printed without representation noise.
std::string fmt_l(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

const char* kShippedInstances = R"(# name w0 w1 1-alpha lambda0 c0 n psi_seed psi_scale
I1 0.9 0.1 0.1 2 0 100 451 1
I2 0.9 0.1 0.1 2 0 100 451 0.8
I3 0.9 0.1 0.1 2 -3 100 451 0.8
I4 0.9 0.1 0.1 2 0 500 298 1
I5 0.9 0.1 0.1 2 0 500 298 0.8
I6 0.9 0.1 0.1 2 -3 500 298 0.8
)";

std::string instance_to_string(const QpInstance& q) {
  return q.name + ":" + fmt_d(q.w0) + ":" + fmt_d(q.w1) + ":" + fmt_d(1.0 - q.alpha) + ":" +
         fmt_d(q.lambda0) + ":" + fmt_d(q.c0) + ":" + fmt_z(q.n) + ":" +
         std::to_string(q.psi_seed) + ":" + fmt_d(q.psi_scale);
}

QpInstance instance_from_fields(const std::vector<std::string>& f) {
  if (f.size() != 9) {
    throw ConfigError("instance row needs 9 fields (name w0 w1 1-alpha lambda0 c0 n "
                      "psi_seed psi_scale)");
  }
  QpInstance q;
  q.name = f[0];
  if (q.name.empty() || !std::all_of(q.name.begin(), q.name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
      })) {
    throw ConfigError("instance names must be alphanumeric: '" + f[0] + "'");
  }
  q.w0 = parse_double("w0", f[1]);
  q.w1 = parse_double("w1", f[2]);
  q.alpha = 1.0 - parse_double("1-alpha", f[3]);
  q.lambda0 = parse_double("lambda0", f[4]);
  q.c0 = parse_double("c0", f[5]);
  q.n = static_cast<std::size_t>(parse_u64("n", f[6]));
  q.psi_seed = parse_u64("psi_seed", f[7]);
  q.psi_scale = parse_double("psi_scale", f[8]);
  if (q.n == 0 || q.lambda0 < 0.0 || q.psi_scale < 0.0 || q.psi_scale > 1.0) {
    throw ConfigError("instance " + q.name + ": need n >= 1, lambda0 >= 0, psi_scale in [0, 1]");
  }
  try {
    (void)q.spec();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("instance " + q.name + ": " + e.what());
  }
  return q;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolveReport as_report(const RepResult& r) {
  SolveReport s;
  s.value = r.saa_value;
  s.nu_hat = r.nu_hat;
  s.n = r.n;
  return s;
}

std::string spec_tag(double w0, double w1, double alpha) {
  return "w0=" + fmt_l(w0) + ";w1=" + fmt_l(w1) + ";alpha=" + fmt_l(alpha);
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------- instances

std::vector<double> QpInstance::psi() const {
  RngStream stream(psi_seed, 0);
  return uniform_probabilities(stream, n, psi_scale);
}

std::vector<QpInstance> parse_instances(const std::string& text) {
  std::vector<QpInstance> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<std::string> fields;
    std::string f;
    while (ls >> f) fields.push_back(f);
    out.push_back(instance_from_fields(fields));
  }
  if (out.empty()) throw ConfigError("instance table is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (out[i].name == out[j].name) throw ConfigError("duplicate instance " + out[i].name);
    }
  }
  return out;
}

std::vector<QpInstance> read_instances(const std::string& path) {
  return parse_instances(read_text(path));
}

std::vector<QpInstance> default_instances() { return parse_instances(kShippedInstances); }

// ------------------------------------------------------------------- config

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  return parse_config_text(read_text(path));
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  c.apply(kv);
  return c;
}

void ExperimentConfig::apply(const std::map<std::string, std::string>& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "experiment") {
      experiment = v;
    } else if (key == "case") {
      dist_case = v;
    } else if (key == "weights") {
      weights = parse_doubles(key, v);
    } else if (key == "estimate_weights") {
      estimate_weights = parse_doubles(key, v);
    } else if (key == "estimate_alphas") {
      estimate_alphas = parse_doubles(key, v);
    } else if (key == "bound_alphas") {
      bound_alphas = parse_doubles(key, v);
    } else if (key == "alpha") {
      alpha = parse_double(key, v);
    } else if (key == "n_grid") {
      n_grid = v.empty() ? std::vector<std::size_t>{} : parse_sizes(key, v);
    } else if (key == "reps") {
      reps = static_cast<std::size_t>(parse_u64(key, v));
    } else if (key == "beta") {
      beta = parse_double(key, v);
    } else if (key == "seed") {
      seed = parse_u64(key, v);
    } else if (key == "out") {
      out = v;
    } else if (key == "scale") {
      if (v == "desk") {
        scale = Scale::kDesk;
      } else if (v == "paper") {
        scale = Scale::kPaper;
      } else {
        throw ConfigError("scale must be 'desk' or 'paper'");
      }
    } else if (key == "instances") {
      instances = v;
      instance_table.clear();
    } else if (key == "instance_table") {
      instance_table.clear();
      for (const auto& row : split(v, '/')) instance_table.push_back(instance_from_fields(split(row, ':')));
    } else if (key == "pairs") {
      pairs.clear();
      for (const auto& p : split(v, ',')) {
        const auto ij = split(p, '-');
        if (ij.size() != 2 || ij[0].empty() || ij[1].empty()) {
          throw ConfigError("pairs entries look like I1-I2, got '" + p + "'");
        }
        pairs.emplace_back(ij[0], ij[1]);
      }
    } else if (key == "na_level") {
      na_level = v;
    } else if (key == "source") {
      source = v;
    } else if (key == "threads") {
      threads = static_cast<unsigned>(parse_u64(key, v));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void ExperimentConfig::validate() const {
  static const char* kExperiments[] = {"compare-dist", "qp", "wcrit", "qq"};
  if (std::find(std::begin(kExperiments), std::end(kExperiments), experiment) ==
      std::end(kExperiments)) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  if (dist_case != "I" && dist_case != "II" && dist_case != "III") {
    throw ConfigError("case must be I, II or III");
  }
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  auto check_level = [](double a, const char* what) {
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigError(std::string(what) + " levels must lie in (0, 1)");
    }
  };
  check_level(alpha, "alpha");
  for (double a : estimate_alphas) check_level(a, "estimate_alphas");
  for (double a : bound_alphas) check_level(a, "bound_alphas");
  auto check_weights = [](const std::vector<double>& w, const char* what) {
    if (w.empty()) throw ConfigError(std::string(what) + " must not be empty");
    for (double v : w) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
    }
  };
  check_weights(weights, "weights");
  check_weights(estimate_weights, "estimate_weights");
  if (estimate_alphas.empty() || bound_alphas.empty()) {
    throw ConfigError("estimate_alphas and bound_alphas must not be empty");
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw ConfigError("n_grid must be positive and strictly increasing");
    }
  }
  if (na_level != "per_interval" && na_level != "union") {
    throw ConfigError("na_level must be 'per_interval' or 'union'");
  }
  if (experiment == "qp" || (experiment == "qq" && source != "dist")) {
    const auto inst = resolved_instances();
    auto known = [&](const std::string& name) {
      return std::any_of(inst.begin(), inst.end(),
                         [&](const QpInstance& q) { return q.name == name; });
    };
    if (experiment == "qq" && !known(source)) {
      throw ConfigError("qq source must be 'dist' or an instance name");
    }
    if (experiment == "qp") {
      if (pairs.empty()) throw ConfigError("pairs must not be empty");
      for (const auto& [a, b] : pairs) {
        if (!known(a) || !known(b)) throw ConfigError("pair " + a + "-" + b + ": unknown instance");
      }
    }
  }
}

std::vector<QpInstance> ExperimentConfig::resolved_instances() const {
  if (!instance_table.empty()) return instance_table;
  if (!instances.empty()) return read_instances(instances);
  return default_instances();
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = experiment;
  kv["case"] = dist_case;
  kv["weights"] = join(weights, fmt_d);
  kv["estimate_weights"] = join(estimate_weights, fmt_d);
  kv["estimate_alphas"] = join(estimate_alphas, fmt_d);
  kv["bound_alphas"] = join(bound_alphas, fmt_d);
  kv["alpha"] = fmt_d(alpha);
  kv["n_grid"] = join(n_grid, fmt_z);
  kv["reps"] = fmt_z(reps);
  kv["beta"] = fmt_d(beta);
  kv["seed"] = std::to_string(seed);
  kv["scale"] = scale == Scale::kDesk ? "desk" : "paper";
  kv["na_level"] = na_level;
  kv["source"] = source;
  if (experiment == "qp" || experiment == "qq") {
    kv["instance_table"] = join(resolved_instances(), instance_to_string, "/");
    kv["pairs"] = join(pairs, [](const auto& p) { return p.first + "-" + p.second; });
  }
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

// ------------------------------------------------------------ distributions

DistributionCase distribution_case(const std::string& id) {
  if (id == "I") {
    return {{10.0, 1.0, kSupportLo, kSupportHi}, {20.0, 1.0, kSupportLo, kSupportHi}};
  }
  if (id == "II") {
    return {{5.0, 1.0, kSupportLo, kSupportHi}, {10.0, 25.0, kSupportLo, kSupportHi}};
  }
  if (id == "III") {
    return {{10.0, 49.0, kSupportLo, kSupportHi}, {14.0, 0.25, kSupportLo, kSupportHi}};
  }
  throw ConfigError("unknown distribution case '" + id + "'");
}

double exact_risk(const TruncNormalSpec& d, const RiskSpec& spec) {
  double r = spec.w0() * d.mean();
  for (std::size_t i = 0; i < spec.k(); ++i) r += spec.avar_weight(i) * d.avar(spec.level(i));
  return r;
}

RepResult run_distribution_rep(const TruncNormalSpec& dist, const RiskSpec& spec,
                               std::size_t n, RngStream& stream, bool with_rsa) {
  const ScenarioMatrix sample = ScenarioMatrix::column(truncnorm_sample(dist, stream, n));
  const SolveReport saa = solve_saa(ScalarLossProgram{}, spec, sample);
  RepResult r;
  r.saa_value = saa.value;
  r.nu_hat = saa.nu_hat;
  r.n = n;
  if (with_rsa) {
    const TauReformulation program(spec, dist.a0(), dist.b0());
    const RsaConstants c =
        scalar_case_constants(spec, dist.a0(), dist.b0(), dist.a0(), program.diameter());
    r.rsa_gbar = run_rsa(program, c, sample).g_bar;
  }
  return r;
}

double estimate_wcrit(std::span<const double> xi1, std::span<const double> xi2,
                      double alpha) {
  const EmpiricalDistribution d1(std::vector<double>(xi1.begin(), xi1.end()));
  const EmpiricalDistribution d2(std::vector<double>(xi2.begin(), xi2.end()));
  const double avar_gap = avar(d1, alpha) - avar(d2, alpha);
  const double denom = d2.mean() - d1.mean() + avar_gap;
  if (!(denom > 0.0)) {
    throw std::domain_error(
        "estimate_wcrit: E xi2 - E xi1 + AVaR(xi1) - AVaR(xi2) <= 0; the two "
        "distributions are not ordered as the formula assumes");
  }
  return avar_gap / denom;
}

namespace {

std::size_t wcrit_n(const ExperimentConfig& cfg) {
  if (!cfg.n_grid.empty()) return cfg.n_grid.front();
  return cfg.scale == Scale::kPaper ? 1000000 : kDeskMaxN;
}

RngStream dist_stream(const ExperimentConfig& cfg, int which, std::size_t n,
                      std::size_t rep) {
  const std::uint64_t tag = fnv1a("dist:" + cfg.dist_case + ":" + std::to_string(which));
  return RngStream(cfg.seed, combine_ids(combine_ids(tag, n), rep));
}

}  // namespace

double estimate_wcrit(const ExperimentConfig& cfg) {
  const DistributionCase dc = distribution_case(cfg.dist_case);
  const std::size_t n = wcrit_n(cfg);
  RngStream s1 = dist_stream(cfg, 1, n, 0);
  RngStream s2 = dist_stream(cfg, 2, n, 0);
  const auto x1 = truncnorm_sample(dc.xi1, s1, n);
  const auto x2 = truncnorm_sample(dc.xi2, s2, n);
  return estimate_wcrit(x1, x2, cfg.alpha);
}

// ----------------------------------------------------------------------- qq

QqData qq_data(std::span<const double> estimates) {
  if (estimates.size() < 8) throw std::invalid_argument("qq_data: need at least 8 values");
  const MomentSummary m = summarize(estimates);
  if (m.degenerate) throw std::invalid_argument("qq_data: constant sample");
  QqData q;
  q.sorted.assign(estimates.begin(), estimates.end());
  std::sort(q.sorted.begin(), q.sorted.end());
  const double sd = std::sqrt(m.variance);
  const double n = static_cast<double>(q.sorted.size());
  q.theoretical.resize(q.sorted.size());
  for (std::size_t i = 0; i < q.sorted.size(); ++i) {
    q.theoretical[i] = m.mean + sd * normal_quantile((static_cast<double>(i) + 0.5) / n);
  }
  q.jb = jarque_bera(estimates);
  return q;
}

namespace {

ResultTable qq_table(const QqData& q) {
  ResultTable t("i", {"theoretical", "sorted"});
  for (std::size_t i = 0; i < q.sorted.size(); ++i) {
    t.add_row(std::to_string(i + 1), {q.theoretical[i], q.sorted[i]});
  }
  t.set_meta("jarque_bera", format_double(q.jb.statistic));
  t.set_meta("jarque_bera_p", format_double(q.jb.p_value));
  return t;
}

}  // namespace

void emit_qq_data(std::span<const double> estimates, const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& meta) {
  ResultTable t = qq_table(qq_data(estimates));
  for (const auto& [k, v] : meta) t.set_meta(k, v);
  t.write_file(path);
}

// --------------------------------------------------------------- experiment

struct Experiment::TableDef {
  std::string name;
  std::string corner;
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::function<double(std::size_t, std::size_t)> cell;
};

struct Experiment::Impl {
  std::vector<TableDef> tables;
  std::vector<QpInstance> instances;
  std::size_t reps = 0;
  Thetas thetas;

  std::mutex mu;
  std::map<std::string, std::shared_ptr<const std::vector<RepResult>>> runs;
  std::map<std::string, std::shared_ptr<const QqData>> qq;

  // Per-replication results behind `key`, computed once.
  const std::vector<RepResult>& cached(const std::string& key,
                                       const std::function<RepResult(std::size_t)>& one,
                                       unsigned threads) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (auto it = runs.find(key); it != runs.end()) return *it->second;
    }
    auto out = std::make_shared<std::vector<RepResult>>(reps);
    parallel_for(reps, [&](std::size_t r) { (*out)[r] = one(r); }, threads);
    std::lock_guard<std::mutex> lock(mu);
    return *runs.emplace(key, std::move(out)).first->second;
  }

  const QpInstance& instance(const std::string& name) const {
    for (const auto& q : instances) {
      if (q.name == name) return q;
    }
    throw ConfigError("unknown instance " + name);
  }
};

namespace {

// Drops grid points above the desk cap; at paper scale keeps them and warns.
std::vector<std::size_t> effective_grid(const ExperimentConfig& cfg,
                                        const std::vector<std::size_t>& defaults,
                                        const std::string& table,
                                        std::vector<std::string>& warnings) {
  const bool user = !cfg.n_grid.empty();
  const auto& grid = user ? cfg.n_grid : defaults;
  std::vector<std::size_t> out;
  std::vector<std::size_t> big;
  for (std::size_t n : grid) {
    if (n > kDeskMaxN) {
      big.push_back(n);
      if (cfg.scale == Scale::kDesk) continue;
    }
    out.push_back(n);
  }
  if (!big.empty()) {
    if (cfg.scale == Scale::kPaper) {
      warnings.push_back(table + ": paper-scale columns N = " + join(big, fmt_z) +
                         " requested; expect long runtimes");
    } else if (user) {
      warnings.push_back(table + ": N = " + join(big, fmt_z) +
                         " exceeds the desk cap and was dropped (use --scale paper)");
    }
  }
  if (out.empty()) {
    throw ConfigError(table + ": no sample sizes left at desk scale (use --scale paper)");
  }
  return out;
}

std::vector<std::string> n_labels(const std::vector<std::size_t>& grid) {
  std::vector<std::string> out;
  for (std::size_t n : grid) out.push_back(std::to_string(n));
  return out;
}

template <class F>
double mean_over(const std::vector<RepResult>& v, F f) {
  double s = 0.0;
  for (const auto& r : v) s += f(r);
  return s / static_cast<double>(v.size());
}

template <class F>
double rate_over(const std::vector<RepResult>& a, const std::vector<RepResult>& b, F accept) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < a.size(); ++r) hits += accept(a[r], b[r]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(a.size());
}

const std::vector<std::string> kBoundColumns = {"Low-As1",  "Up-As1",  "Low-RSA1",
                                                "Up-RSA1",  "Low-As2", "Up-As2",
                                                "Low-RSA2", "Up-RSA2"};

}  // namespace

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)), impl_(new Impl) {
  cfg_.validate();
  Impl& im = *impl_;
  im.reps = cfg_.reps;
  if (cfg_.scale == Scale::kDesk && im.reps > kDeskMaxReps) {
    warnings_.push_back("desk scale caps replications at " + std::to_string(kDeskMaxReps));
    im.reps = kDeskMaxReps;
  }
  // per_interval: each interval at level 1 - beta. "union" splits beta
  // over the two intervals a test compares.
  im.thetas = compute_thetas(cfg_.na_level == "union" ? cfg_.beta / 2.0 : cfg_.beta);
  const unsigned threads = cfg_.threads;
  const ExperimentConfig& c = cfg_;
  Impl* ip = impl_.get();

  if (c.experiment == "compare-dist" || c.experiment == "wcrit" ||
      (c.experiment == "qq" && c.source == "dist")) {
    const DistributionCase dc = distribution_case(c.dist_case);
    auto dist_runs = [ip, cp = &cfg_, dc, threads](int which, double w0, double alpha,
                                                   std::size_t n) -> const std::vector<RepResult>& {
      const ExperimentConfig& c = *cp;
      const std::string key = "dist:" + std::to_string(which) + ":" + fmt_d(w0) + ":" +
                              fmt_d(alpha) + ":" + std::to_string(n);
      return ip->cached(
          key,
          [&, which, w0, alpha, n](std::size_t rep) {
            RngStream s = dist_stream(c, which, n, rep);
            return run_distribution_rep(which == 1 ? dc.xi1 : dc.xi2,
                                        RiskSpec::mean_avar(w0, 1.0 - w0, alpha), n, s, true);
          },
          threads);
    };

    if (c.experiment == "compare-dist") {
      // Mean SAA / RSA estimate of R(xi_1).
      {
        TableDef t{"estimates", "spec;method", {}, {}, {}};
        const auto grid = effective_grid(c, kEstimateGrid, t.name, warnings_);
        t.columns = n_labels(grid);
        struct Row { double w0, alpha; bool rsa; };
        std::vector<Row> rows;
        for (double w0 : c.estimate_weights) {
          for (double a : c.estimate_alphas) {
            for (bool rsa : {false, true}) {
              rows.push_back({w0, a, rsa});
              t.rows.push_back(spec_tag(w0, 1.0 - w0, a) + (rsa ? ";RSA" : ";SAA"));
            }
          }
        }
        t.cell = [=](std::size_t r, std::size_t col) {
          const auto& runs = dist_runs(1, rows[r].w0, rows[r].alpha, grid[col]);
          return mean_over(runs, [&](const RepResult& x) {
            return rows[r].rsa ? x.rsa_gbar : x.saa_value;
          });
        };
        impl_->tables.push_back(std::move(t));
      }
      // Mean asymptotic and RSA bounds for both risks.
      {
        TableDef t{"bounds", "alpha;N", kBoundColumns, {}, {}};
        const auto grid = effective_grid(c, kBoundGrid, t.name, warnings_);
        const double w0 = c.estimate_weights.front();
        struct Row { double alpha; std::size_t n; };
        std::vector<Row> rows;
        for (double a : c.bound_alphas) {
          for (std::size_t n : grid) {
            rows.push_back({a, n});
            t.rows.push_back("w0=" + fmt_d(w0) + ";alpha=" + fmt_d(a) + ";N=" + fmt_z(n));
          }
        }
        t.cell = [=](std::size_t r, std::size_t col) {
          const int which = col < 4 ? 1 : 2;
          const auto& runs = dist_runs(which, w0, rows[r].alpha, rows[r].n);
          const RiskSpec spec = RiskSpec::mean_avar(w0, 1.0 - w0, rows[r].alpha);
          const TruncNormalSpec& d = which == 1 ? dc.xi1 : dc.xi2;
          const RsaConstants k = scalar_case_constants(
              spec, d.a0(), d.b0(), d.a0(), TauReformulation(spec, d.a0(), d.b0()).diameter());
          return mean_over(runs, [&](const RepResult& x) {
            switch (col % 4) {
              case 0: return asymptotic_ci(as_report(x), c.beta).low;
              case 1: return asymptotic_ci(as_report(x), c.beta).up;
              case 2: return bounds(x.rsa_gbar, k, ip->thetas, x.n).low;
              default: return bounds(x.rsa_gbar, k, ip->thetas, x.n).up;
            }
          });
        };
        impl_->tables.push_back(std::move(t));
      }
      // Type II error tables. Rows: w0 (w1 = 1 - w0); cells: acceptance rate of H0.
      const CaseGrids grids = case_grids(c.dist_case);
      std::vector<std::string> wrows;
      for (double w0 : c.weights) wrows.push_back("w0=" + fmt_l(w0) + ";w1=" + fmt_l(1.0 - w0));
      const std::vector<double> weights = c.weights;
      auto rsa_interval = [=](int which, const RepResult& x, const RiskSpec& spec) {
        const TruncNormalSpec& d = which == 1 ? dc.xi1 : dc.xi2;
        const RsaConstants k = scalar_case_constants(
            spec, d.a0(), d.b0(), d.a0(), TauReformulation(spec, d.a0(), d.b0()).diameter());
        return bounds(x.rsa_gbar, k, ip->thetas, x.n);
      };
      auto add_typeii = [&](const std::string& name, const std::vector<std::size_t>& defaults,
                            bool asymptotic, bool onesided) {
        TableDef t{name, "weights", {}, wrows, {}};
        const auto grid = effective_grid(c, defaults, name, warnings_);
        t.columns = n_labels(grid);
        if (onesided) {
          // H0: R(larger) <= R(smaller); the exact risks decide the orientation.
          for (std::size_t r = 0; r < weights.size(); ++r) {
            const RiskSpec spec = RiskSpec::mean_avar(weights[r], 1.0 - weights[r], c.alpha);
            const bool two_larger = exact_risk(dc.xi2, spec) > exact_risk(dc.xi1, spec);
            t.rows[r] += two_larger ? ";H0:R2<=R1" : ";H0:R1<=R2";
          }
        }
        t.cell = [=](std::size_t r, std::size_t col) {
          const double w0 = weights[r];
          const RiskSpec spec = RiskSpec::mean_avar(w0, 1.0 - w0, c.alpha);
          const int hi = !onesided || exact_risk(dc.xi2, spec) > exact_risk(dc.xi1, spec) ? 2 : 1;
          const int lo = 3 - hi;
          const auto& a = dist_runs(hi, w0, c.alpha, grid[col]);
          const auto& b = dist_runs(lo, w0, c.alpha, grid[col]);
          return rate_over(a, b, [&](const RepResult& x, const RepResult& y) {
            if (asymptotic) {
              return !as_test_two_sample(as_report(x), as_report(y), c.beta,
                                         onesided ? PairVariant::kDominance
                                                  : PairVariant::kEquality)
                          .reject;
            }
            const ConfidenceInterval iv[2] = {rsa_interval(hi, x, spec),
                                              rsa_interval(lo, y, spec)};
            return !(onesided ? na_test_dominance(iv, 0) : na_test_equality(iv)).reject;
          });
        };
        impl_->tables.push_back(std::move(t));
      };
      add_typeii("typeII_as_equality", grids.as_equality, true, false);
      add_typeii("typeII_na_equality", grids.na_equality, false, false);
      add_typeii("typeII_as_onesided", grids.as_onesided, true, true);
      add_typeii("typeII_na_onesided", grids.na_onesided, false, true);
    } else if (c.experiment == "wcrit") {
      const std::size_t n = wcrit_n(c);
      if (c.scale == Scale::kDesk && n > kDeskMaxN) {
        throw ConfigError("wcrit: N above the desk cap (use --scale paper)");
      }
      TableDef t{"wcrit", "N", {"w_crit"}, {std::to_string(n)}, {}};
      t.cell = [this](std::size_t, std::size_t) { return estimate_wcrit(cfg_); };
      impl_->tables.push_back(std::move(t));
    } else {
      // qq on SAA values of xi_1.
      const std::size_t n = c.n_grid.empty() ? 20 : c.n_grid.front();
      if (c.scale == Scale::kDesk && n > kDeskMaxN) {
        throw ConfigError("qq: N above the desk cap (use --scale paper)");
      }
      const double w0 = c.estimate_weights.front();
      TableDef t{"qq", "i", {"theoretical", "sorted"}, {}, {}};
      for (std::size_t i = 0; i < im.reps; ++i) t.rows.push_back(std::to_string(i + 1));
      t.cell = [=](std::size_t r, std::size_t col) {
        const std::string key = "qq";
        std::shared_ptr<const QqData> q;
        {
          std::lock_guard<std::mutex> lock(ip->mu);
          if (auto it = ip->qq.find(key); it != ip->qq.end()) q = it->second;
        }
        if (!q) {
          const auto& runs = dist_runs(1, w0, c.alpha, n);
          std::vector<double> v;
          for (const auto& x : runs) v.push_back(x.saa_value);
          q = std::make_shared<const QqData>(qq_data(v));
          std::lock_guard<std::mutex> lock(ip->mu);
          ip->qq.emplace(key, q);
        }
        return col == 0 ? q->theoretical[r] : q->sorted[r];
      };
      impl_->tables.push_back(std::move(t));
    }
    return;
  }

  // Portfolio instances.
  im.instances = c.resolved_instances();
  // Runs depend on the sample law and the problem without c0; c0 is added on
  // read, so instances that differ only by c0 share their samples.
  auto qp_runs = [ip, cp = &cfg_, threads](const QpInstance& q,
                                           std::size_t n) -> const std::vector<RepResult>& {
    const ExperimentConfig& c = *cp;
    const std::string sample_tag = "qp:" + std::to_string(q.n) + ":" +
                                   std::to_string(q.psi_seed) + ":" + fmt_d(q.psi_scale);
    const std::string key = sample_tag + ":" + fmt_d(q.w0) + ":" + fmt_d(q.w1) + ":" +
                            fmt_d(q.alpha) + ":" + fmt_d(q.lambda0) + ":" + std::to_string(n);
    return ip->cached(
        key,
        [&, sample_tag, n](std::size_t rep) {
          const BernoulliVectorSpec law(q.psi());
          RngStream s(c.seed, combine_ids(combine_ids(fnv1a(sample_tag), n), rep));
          const ScenarioMatrix sample = bernoulli_vector_sample(law, s, n);
          const PortfolioProgram program(q.n, q.lambda0, 0.0);
          const RiskSpec spec = q.spec();
          const SolveReport saa = solve_saa(program, spec, sample);
          RsaOptions opt;
          opt.spec = spec;
          const RsaRun rsa =
              run_rsa(program, portfolio_constants(spec, q.n, q.lambda0), sample, opt);
          return RepResult{saa.value, saa.nu_hat, n, rsa.g_bar};
        },
        threads);
  };
  auto shifted = [](RepResult r, double c0) {
    r.saa_value += c0;
    r.rsa_gbar += c0;
    return r;
  };
  auto rsa_interval = [ip](const QpInstance& q, const RepResult& x) {
    return bounds(x.rsa_gbar, portfolio_constants(q.spec(), q.n, q.lambda0), ip->thetas, x.n);
  };

  if (c.experiment == "qq") {
    const std::size_t n = c.n_grid.empty() ? 20 : c.n_grid.front();
    if (c.scale == Scale::kDesk && n > kDeskMaxN) {
      throw ConfigError("qq: N above the desk cap (use --scale paper)");
    }
    const QpInstance q = im.instance(c.source);
    TableDef t{"qq", "i", {"theoretical", "sorted"}, {}, {}};
    for (std::size_t i = 0; i < im.reps; ++i) t.rows.push_back(std::to_string(i + 1));
    t.cell = [=](std::size_t r, std::size_t col) {
      std::shared_ptr<const QqData> data;
      {
        std::lock_guard<std::mutex> lock(ip->mu);
        if (auto it = ip->qq.find("qq"); it != ip->qq.end()) data = it->second;
      }
      if (!data) {
        std::vector<double> v;
        for (const auto& x : qp_runs(q, n)) v.push_back(shifted(x, q.c0).saa_value);
        data = std::make_shared<const QqData>(qq_data(v));
        std::lock_guard<std::mutex> lock(ip->mu);
        ip->qq.emplace("qq", data);
      }
      return col == 0 ? data->theoretical[r] : data->sorted[r];
    };
    impl_->tables.push_back(std::move(t));
    return;
  }

  const QpInstance first = im.instance(c.pairs.front().first);
  const QpInstance second = im.instance(c.pairs.front().second);
  // Mean SAA / RSA value of the first pair's second instance.
  {
    TableDef t{"values", "method", {}, {second.name + ";SAA", second.name + ";RSA"}, {}};
    const auto grid = effective_grid(c, kQpGrid, t.name, warnings_);
    t.columns = n_labels(grid);
    t.cell = [=](std::size_t r, std::size_t col) {
      return mean_over(qp_runs(second, grid[col]), [&](const RepResult& x) {
        const RepResult s = shifted(x, second.c0);
        return r == 0 ? s.saa_value : s.rsa_gbar;
      });
    };
    impl_->tables.push_back(std::move(t));
  }
  // Mean bounds; "1" is the pair's first instance, "2" its second.
  {
    TableDef t{"bounds", "N", kBoundColumns, {}, {}};
    const auto grid = effective_grid(c, kQpGrid, t.name, warnings_);
    t.rows = n_labels(grid);
    t.cell = [=](std::size_t r, std::size_t col) {
      const QpInstance& q = col < 4 ? first : second;
      return mean_over(qp_runs(q, grid[r]), [&](const RepResult& x0) {
        const RepResult x = shifted(x0, q.c0);
        switch (col % 4) {
          case 0: return asymptotic_ci(as_report(x), c.beta).low;
          case 1: return asymptotic_ci(as_report(x), c.beta).up;
          case 2: return rsa_interval(q, x).low;
          default: return rsa_interval(q, x).up;
        }
      });
    };
    impl_->tables.push_back(std::move(t));
  }
  // Type II error of the equality and dominance tests on each pair.
  for (const bool dominance : {false, true}) {
    TableDef t{dominance ? "typeII_dominance" : "typeII_equality", "test", {}, {}, {}};
    const auto grid = effective_grid(c, kQpGrid, t.name, warnings_);
    t.columns = n_labels(grid);
    std::vector<std::pair<QpInstance, QpInstance>> rows;
    for (const auto& [a, b] : c.pairs) {
      for (const char* kind : {"asymptotic", "nonasymptotic"}) {
        rows.emplace_back(im.instance(a), im.instance(b));
        t.rows.push_back(a + (dominance ? "<=" : "=") + b + ";" + kind);
      }
    }
    t.cell = [=](std::size_t r, std::size_t col) {
      const auto& [qa, qb] = rows[r];
      const bool asymptotic = r % 2 == 0;
      return rate_over(qp_runs(qa, grid[col]), qp_runs(qb, grid[col]),
                       [&](const RepResult& x0, const RepResult& y0) {
                         const RepResult x = shifted(x0, qa.c0), y = shifted(y0, qb.c0);
                         if (asymptotic) {
                           return !as_test_two_sample(as_report(x), as_report(y), c.beta,
                                                      dominance ? PairVariant::kDominance
                                                                : PairVariant::kEquality)
                                       .reject;
                         }
                         const ConfidenceInterval iv[2] = {rsa_interval(qa, x),
                                                           rsa_interval(qb, y)};
                         return !(dominance ? na_test_dominance(iv, 0) : na_test_equality(iv))
                                     .reject;
                       });
    };
    impl_->tables.push_back(std::move(t));
  }
}

Experiment::~Experiment() = default;

std::string Experiment::name() const {
  return cfg_.experiment == "compare-dist" ? "compare-dist-" + cfg_.dist_case : cfg_.experiment;
}

std::vector<std::string> Experiment::table_names() const {
  std::vector<std::string> out;
  for (const auto& t : impl_->tables) out.push_back(t.name);
  return out;
}

const Experiment::TableDef& Experiment::def(const std::string& table) const {
  for (const auto& t : impl_->tables) {
    if (t.name == table) return t;
  }
  throw ConfigError("experiment " + name() + " has no table '" + table + "'");
}

std::pair<std::size_t, std::size_t> Experiment::shape(const std::string& table) const {
  const TableDef& t = def(table);
  return {t.rows.size(), t.columns.size()};
}

double Experiment::cell(const std::string& table, std::size_t row, std::size_t col) {
  const TableDef& t = def(table);
  if (row >= t.rows.size() || col >= t.columns.size()) {
    throw std::out_of_range("Experiment::cell: index outside " + table);
  }
  return t.cell(row, col);
}

ResultTable Experiment::build(const std::string& table) {
  const TableDef& t = def(table);
  ResultTable out(t.corner, t.columns);
  out.set_meta("experiment", name());
  out.set_meta("table", t.name);
  out.set_meta("seed", std::to_string(cfg_.seed));
  out.set_meta("reps", std::to_string(impl_->reps));
  out.set_meta("config_hash", hex64(cfg_.hash()));
  out.set_meta("config", cfg_.canonical());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<double> cells(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) cells[c] = t.cell(r, c);
    out.add_row(t.rows[r], std::move(cells));
  }
  if (t.name == "qq") {
    std::vector<double> v;
    for (std::size_t r = 0; r < out.rows(); ++r) v.push_back(out.at(r, 1));
    const JarqueBera jb = jarque_bera(v);
    out.set_meta("jarque_bera", format_double(jb.statistic));
    out.set_meta("jarque_bera_p", format_double(jb.p_value));
  }
  return out;
}

std::vector<std::string> Experiment::write_all() {
  std::filesystem::create_directories(cfg_.out);
  std::vector<std::string> paths;
  for (const auto& t : impl_->tables) {
    const std::string path = (std::filesystem::path(cfg_.out) /
                              (name() + "_" + t.name + "_" + std::to_string(cfg_.seed) + ".csv"))
                                 .string();
    build(t.name).write_file(path);
    paths.push_back(path);
  }
  return paths;
}

VerifyOutcome verify_table(const ResultTable& table, std::uint64_t chooser,
                           std::optional<std::pair<std::size_t, std::size_t>> cell) {
  const auto canon = table.meta("config");
  const auto hash = table.meta("config_hash");
  const auto name = table.meta("table");
  if (!canon || !hash || !name) {
    throw ConfigError("table lacks config / config_hash / table metadata");
  }
  if (hex64(fnv1a(*canon)) != *hash) throw ConfigError("config hash does not match config");
  std::map<std::string, std::string> kv;
  for (const auto& item : split(*canon, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed config entry '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  Experiment exp(ExperimentConfig::from_map(kv));
  if (exp.shape(*name) != std::make_pair(table.rows(), table.columns().size())) {
    throw ConfigError("table shape does not match its config");
  }
  VerifyOutcome v;
  v.table = *name;
  if (cell) {
    if (cell->first >= table.rows() || cell->second >= table.columns().size()) {
      throw ConfigError("requested cell outside the table");
    }
    v.row = cell->first;
    v.col = cell->second;
  } else {
    RngStream pick(chooser, fnv1a("verify"));
    const std::size_t total = table.rows() * table.columns().size();
    const std::size_t k = static_cast<std::size_t>(pick.uniform_open() * static_cast<double>(total));
    v.row = std::min(k, total - 1) / table.columns().size();
    v.col = std::min(k, total - 1) % table.columns().size();
  }
  v.stored = table.at(v.row, v.col);
  v.recomputed = exp.cell(*name, v.row, v.col);
  v.match = v.stored == v.recomputed;
  return v;
}

}  // namespace riskopt
