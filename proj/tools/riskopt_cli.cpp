// riskopt: command-line driver for the Monte Carlo studies.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure or a
// verify mismatch.
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "riskopt/experiments.hpp"
#include "riskopt/table.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

struct CommonFlags {
  std::string config;
  std::map<std::string, std::string> overrides;
};

// Registers the shared flags on `sub`; set values land in flags.overrides.
void add_common(CLI::App* sub, CommonFlags& flags) {
  auto opt = [&](const std::string& name, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
  };
  sub->add_option("--config", flags.config,
                  "key = value file; flags given on the command line win");
  opt("--seed", "seed", "master seed (default 1)");
  opt("--reps", "reps", "replications per cell (default 100; desk scale caps at 100)");
  opt("--beta", "beta", "test / confidence level beta (default 0.1)");
  opt("--alpha", "alpha", "AVaR level alpha of the test tables, e.g. 0.9 for 1-alpha = 0.1 "
                          "(default 0.9)");
  opt("--weights", "weights",
      "comma list of w0 for the test-table rows, w1 = 1 - w0 (default 0,0.1,...,0.9)");
  opt("--n-grid", "n_grid",
      "comma list of sample sizes replacing every table's default columns");
  opt("--out", "out", "output directory (default .)");
  opt("--scale", "scale", "desk (N <= 1e5, reps <= 100; default) or paper");
  opt("--na-level", "na_level",
      "RSA interval level: per_interval (each 1-beta, default) or union (1-beta/2 each)");
  opt("--threads", "threads", "worker threads (default: hardware concurrency)");
}

// Precedence: defaults < config file < command line.
riskopt::ExperimentConfig make_config(const std::string& experiment, const CommonFlags& flags,
                                      const std::map<std::string, std::string>& extra,
                                      std::map<std::string, std::string> kv = {}) {
  if (!flags.config.empty()) {
    for (const auto& [k, v] : riskopt::read_config_file(flags.config)) kv[k] = v;
  }
  for (const auto& [k, v] : flags.overrides) kv[k] = v;
  for (const auto& [k, v] : extra) kv[k] = v;
  kv["experiment"] = experiment;
  return riskopt::ExperimentConfig::from_map(kv);
}

int run_experiment(const riskopt::ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  riskopt::Experiment exp(cfg);
  const auto paths = exp.write_all();
  for (const auto& w : exp.warnings()) std::cerr << "warning: " << w << '\n';
  for (const auto& p : paths) std::cout << p << '\n';
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << exp.name() << ": " << paths.size() << " table(s) in " << secs << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-averse stochastic programs: SAA / RSA estimates, confidence bounds "
               "and tests on optimal values."};
  app.require_subcommand(1);

  CommonFlags flags;
  std::map<std::string, std::string> extra;

  auto* compare = app.add_subcommand(
      "compare-dist", "compare R(xi1) and R(xi2) for two truncated normals on [0, 30]: "
                      "estimates, bounds and type-II-error tables");
  add_common(compare, flags);
  compare->add_option_function<std::string>(
      "--case", [&](const std::string& v) { extra["case"] = v; },
      "I: N(10,1) vs N(20,1); II: N(5,1) vs N(10,25); III: N(10,49) vs N(14,0.25)")
      ->required()
      ->check(CLI::IsMember({"I", "II", "III"}));

  auto* qp = app.add_subcommand(
      "qp", "portfolio instances: value, bound and type-II-error tables");
  add_common(qp, flags);
  qp->add_option_function<std::string>(
      "--instances", [&](const std::string& v) { extra["instances"] = v; },
      "instance file (rows: name w0 w1 1-alpha lambda0 c0 n psi_seed psi_scale); "
      "default: the shipped I1..I6");
  qp->add_option_function<std::string>(
      "--pairs", [&](const std::string& v) { extra["pairs"] = v; },
      "instance pairs for the tests (default I1-I2,I1-I3,I4-I5,I4-I6)");

  auto* wcrit = app.add_subcommand(
      "wcrit", "plug-in estimate of the weight w0 at which R(xi1) = R(xi2) (case III)");
  add_common(wcrit, flags);
  wcrit->add_option_function<std::string>(
      "--case", [&](const std::string& v) { extra["case"] = v; }, "distribution case (default III)");

  auto* qq = app.add_subcommand(
      "qq", "QQ data of SAA values against a fitted normal, with Jarque-Bera in the header");
  add_common(qq, flags);
  qq->add_option_function<std::string>(
      "--source", [&](const std::string& v) { extra["source"] = v; },
      "dist (xi1 of --case, spec w0 = 0.1, w1 = 0.9) or an instance name (default dist)");
  qq->add_option_function<std::string>(
      "--case", [&](const std::string& v) { extra["case"] = v; }, "distribution case (default I)");
  qq->add_option_function<std::string>(
      "--instances", [&](const std::string& v) { extra["instances"] = v; }, "instance file");

  auto* verify = app.add_subcommand(
      "verify", "recompute one cell of an emitted table and compare it bit for bit");
  std::string table_path;
  std::optional<std::uint64_t> choose;
  std::vector<std::size_t> cell;
  verify->add_option("table", table_path, "CSV written by riskopt")->required();
  verify->add_option("--choose", choose, "seed for the cell draw (default: random)");
  verify->add_option("--cell", cell, "row col (0-based) instead of a random draw")
      ->expected(2)
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  try {
    if (*compare) return run_experiment(make_config("compare-dist", flags, extra));
    if (*qp) return run_experiment(make_config("qp", flags, extra));
    if (*wcrit) return run_experiment(make_config("wcrit", flags, extra, {{"case", "III"}}));
    if (*qq) return run_experiment(make_config("qq", flags, extra));
    // verify
    const riskopt::ResultTable table = riskopt::ResultTable::read_file(table_path);
    std::optional<std::pair<std::size_t, std::size_t>> which;
    if (!cell.empty()) which = std::make_pair(cell[0], cell[1]);
    const std::uint64_t chooser =
        choose ? *choose
               : static_cast<std::uint64_t>(
                     std::chrono::steady_clock::now().time_since_epoch().count());
    const auto v = riskopt::verify_table(table, chooser, which);
    std::cout << v.table << " [" << v.row << "," << v.col << "] stored "
              << riskopt::format_double(v.stored) << " recomputed "
              << riskopt::format_double(v.recomputed) << (v.match ? " MATCH" : " MISMATCH")
              << '\n';
    return v.match ? 0 : kNumericExit;
  } catch (const riskopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericExit;
  }
}
