// Monte Carlo studies: comparison of two truncated-normal loss distributions
// (cases I-III), the Bernoulli portfolio instances, w_Crit and QQ data.
//
// Every table cell is a deterministic function of (config, table, row, col):
// replication r of a cell draws from stream (seed, f(sample tag, N, r)), so a
// single cell can be recomputed in isolation and compared bit for bit.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskopt/risk.hpp"
#include "riskopt/rng.hpp"
#include "riskopt/samplers.hpp"
#include "riskopt/statfun.hpp"
#include "riskopt/table.hpp"

namespace riskopt {

/// Invalid configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scale { kDesk, kPaper };

/// Desk scale drops N above this and caps replications at kDeskMaxReps.
inline constexpr std::size_t kDeskMaxN = 100000;
inline constexpr std::size_t kDeskMaxReps = 100;

/// One row of the instance table: problem (w0, w1, 1-alpha, lambda0, c0, n)
/// with P(xi_i = 1) = psi_scale * U_i, U drawn from stream (psi_seed, 0).
struct QpInstance {
  std::string name;
  double w0 = 0.9;
  double w1 = 0.1;
  double alpha = 0.9;  ///< level; files store 1 - alpha
  double lambda0 = 2.0;
  double c0 = 0.0;
  std::size_t n = 100;
  std::uint64_t psi_seed = 0;
  double psi_scale = 1.0;

  RiskSpec spec() const { return RiskSpec::mean_avar(w0, w1, alpha); }
  std::vector<double> psi() const;
};

/// Whitespace-separated rows `name w0 w1 1-alpha lambda0 c0 n psi_seed psi_scale`;
/// '#' starts a comment. Throws ConfigError.
std::vector<QpInstance> parse_instances(const std::string& text);
std::vector<QpInstance> read_instances(const std::string& path);
/// The six instances shipped with the tool (tools/instances.txt).
std::vector<QpInstance> default_instances();

struct ExperimentConfig {
  std::string experiment = "compare-dist";  ///< compare-dist | qp | wcrit | qq
  std::string dist_case = "I";
  /// w0 of the rows of the test tables (w1 = 1 - w0).
  std::vector<double> weights = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> estimate_weights = {0.1, 0.9};
  std::vector<double> estimate_alphas = {0.99, 0.9, 0.5};
  std::vector<double> bound_alphas = {0.9, 0.5};
  double alpha = 0.9;  ///< level of the test tables
  /// Overrides every table's default grid when non-empty.
  std::vector<std::size_t> n_grid;
  std::size_t reps = 100;
  double beta = 0.1;
  std::uint64_t seed = 1;
  std::string out = ".";
  Scale scale = Scale::kDesk;
  std::string instances;  ///< instance file; empty = shipped instances
  /// Resolved instance rows; carried in canonical() so a table can be
  /// recomputed without the file. Filled from `instances` when empty.
  std::vector<QpInstance> instance_table;
  /// Instance pairs (i, j) of the qp test tables: H0 v_i = v_j / v_i <= v_j.
  /// The first pair also drives the value and bound tables.
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"I1", "I2"}, {"I1", "I3"}, {"I4", "I5"}, {"I4", "I6"}};
  /// "per_interval": each RSA interval at level 1 - beta (the convention
  /// behind the reference type-II tables); "union": 1 - beta/2 per interval
  /// so that the two-interval union bound holds at 1 - beta.
  std::string na_level = "per_interval";
  std::string source = "dist";  ///< qq: "dist" (case xi_1) or an instance name
  unsigned threads = 0;

  /// Builds a config from key/value pairs (config-file keys). Unknown keys
  /// and malformed values throw ConfigError.
  static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
  /// Applies `kv` on top of this config.
  void apply(const std::map<std::string, std::string>& kv);
  /// Throws ConfigError when an invariant fails.
  void validate() const;
  /// Sorted `key=value` list joined by ';' (everything except out/threads).
  std::string canonical() const;
  /// FNV-1a of canonical().
  std::uint64_t hash() const;
  /// instance_table, else the file named by `instances`, else the defaults.
  std::vector<QpInstance> resolved_instances() const;
};

/// `key = value` lines, '#' comments. Throws ConfigError.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

std::uint64_t fnv1a(const std::string& s);

struct DistributionCase {
  TruncNormalSpec xi1;
  TruncNormalSpec xi2;
};
/// Cases "I", "II", "III" on the support [0, 30]. Throws ConfigError otherwise.
DistributionCase distribution_case(const std::string& id);

/// Exact R(X) = w0 E X + w1 AVaR_alpha(X) of a truncated normal.
double exact_risk(const TruncNormalSpec& d, const RiskSpec& spec);

/// Result of one replication on one sample.
struct RepResult {
  double saa_value = 0.0;
  double nu_hat = 0.0;
  std::size_t n = 0;
  double rsa_gbar = 0.0;
};

/// SAA (plug-in) and, when `with_rsa`, RSA on one sample of size n drawn
/// from `dist` with `stream`.
RepResult run_distribution_rep(const TruncNormalSpec& dist, const RiskSpec& spec,
                               std::size_t n, RngStream& stream, bool with_rsa);

/// (AVaR(xi1) - AVaR(xi2)) / (E xi2 - E xi1 + AVaR(xi1) - AVaR(xi2)) on the
/// plug-in estimates. Throws std::domain_error when the denominator is <= 0.
double estimate_wcrit(std::span<const double> xi1, std::span<const double> xi2,
                      double alpha);
/// Case III samples of size n_grid[0] (default 10^6 at paper scale, 10^5 at desk).
double estimate_wcrit(const ExperimentConfig& cfg);

struct QqData {
  std::vector<double> theoretical;  ///< mean + sd Phi^{-1}((i - 0.5)/n)
  std::vector<double> sorted;
  JarqueBera jb;
};
/// Throws std::invalid_argument for fewer than 8 values or a constant sample.
QqData qq_data(std::span<const double> estimates);
/// Two-column CSV with the Jarque-Bera statistic and p-value in '#' lines.
void emit_qq_data(std::span<const double> estimates, const std::string& path,
                  const std::vector<std::pair<std::string, std::string>>& meta = {});

/// The tables of one experiment. Cells are computed lazily and the
/// per-replication runs behind them are cached, so building every table
/// costs one pass over the (problem, N, replication) triples.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);
  ~Experiment();
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  const ExperimentConfig& config() const { return cfg_; }
  /// e.g. "compare-dist-I"; used as the file-name prefix.
  std::string name() const;
  std::vector<std::string> table_names() const;
  /// Full table with metadata (experiment, table, seed, config, hash).
  ResultTable build(const std::string& table);
  double cell(const std::string& table, std::size_t row, std::size_t col);
  /// Shape of a table without computing it.
  std::pair<std::size_t, std::size_t> shape(const std::string& table) const;
  /// Notes collected while building (dropped columns, capped reps).
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Writes every table as <out>/<name>_<table>_<seed>.csv; returns the paths.
  std::vector<std::string> write_all();

 private:
  struct TableDef;
  struct Impl;
  const TableDef& def(const std::string& table) const;

  ExperimentConfig cfg_;
  std::vector<std::string> warnings_;
  std::unique_ptr<Impl> impl_;
};

struct VerifyOutcome {
  std::string table;
  std::size_t row = 0;
  std::size_t col = 0;
  double stored = 0.0;
  double recomputed = 0.0;
  bool match = false;
};

/// Re-runs one cell of a table written by Experiment::build. The cell is
/// drawn with `chooser` (uniform over cells) unless `cell` is given.
/// Throws ConfigError when the metadata is missing or inconsistent.
VerifyOutcome verify_table(const ResultTable& table, std::uint64_t chooser,
                           std::optional<std::pair<std::size_t, std::size_t>> cell = {});

}  // namespace riskopt
