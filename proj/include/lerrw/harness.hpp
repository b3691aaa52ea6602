#pragma once

// Reproducible experiment driver: scaling-law, log-resistance SLLN,
// moment and hitting-time experiments, plus the verification suite.
//
// Replicas are the unit of parallel work. Each replica draws from its own
// random stream derived from (master seed, alpha, delta, replica index), and
// records are emitted in (grid index, replica index) order, so the output
// does not depend on the worker count.

#include "lerrw/scheme.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lerrw {

/// Invalid or out-of-regime experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Limsup, Slln, Moments, Hitting };
enum class OutputFormat { Csv, Json };
enum class EnvironmentSource { Sampled, Unit };

[[nodiscard]] std::string_view to_string(ExperimentKind k) noexcept;
[[nodiscard]] std::string_view to_string(OutputFormat f) noexcept;
[[nodiscard]] std::string_view to_string(EnvironmentSource s) noexcept;
/// Throw ConfigError on unknown names.
[[nodiscard]] ExperimentKind parse_experiment_kind(std::string_view s);
[[nodiscard]] OutputFormat parse_output_format(std::string_view s);
[[nodiscard]] EnvironmentSource parse_environment_source(std::string_view s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Limsup;
  std::vector<WalkConfig> grid{WalkConfig{}};
  std::uint64_t master_seed = 1;
  /// Replicas per grid point: walks (limsup), environments (slln, moments,
  /// hitting). Replica indices run over [first_replica, first_replica+seeds).
  std::uint64_t seeds = 10;
  std::uint64_t first_replica = 0;
  /// Steps (limsup) or site index x (slln, moments, hitting).
  std::uint64_t horizon = 1'000'000;
  /// Explicit checkpoints; when empty, ceil(c * 1.5^k) up to the horizon.
  std::vector<std::uint64_t> checkpoints;
  double checkpoint_base = 16.0;
  /// Hitting only.
  EnvironmentSource environment = EnvironmentSource::Sampled;
  std::uint64_t walks_per_environment = 2000;
  std::uint64_t hit_budget = 10'000'000'000ULL;
  /// 0 means one per hardware thread.
  unsigned workers = 1;
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;

  /// Throws ConfigError.
  void validate() const;
  /// Checkpoints actually used, sorted and clipped to [1, horizon].
  [[nodiscard]] std::vector<std::uint64_t> schedule() const;
};

/// Reads an ExperimentConfig from JSON, starting from `base` so that keys
/// missing from the file keep their values. Throws ConfigError.
[[nodiscard]] ExperimentConfig config_from_json(std::string_view text,
                                                ExperimentConfig base = {});
[[nodiscard]] std::string config_to_json(const ExperimentConfig& cfg);

struct ExperimentRecord {
  ExperimentKind kind = ExperimentKind::Limsup;
  double alpha = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint = 0;
  std::string statistic;
  double value = 0.0;
  double normalizer = 1.0;
  double ratio = 0.0;
};

inline constexpr std::string_view kRecordCsvHeader =
    "kind,alpha,delta,seed,checkpoint,statistic,value,normalizer,ratio";

/// Stream seed of replica `replica` at grid point cfg.
[[nodiscard]] std::uint64_t replica_seed(std::uint64_t master,
                                         const WalkConfig& cfg,
                                         std::uint64_t replica) noexcept;

/// Called with records in deterministic order, once per replica batch.
using RecordSink = std::function<void(const std::vector<ExperimentRecord>&)>;

/// Normalizer for the record's statistic, from (kind, alpha, delta,
/// checkpoint) alone:
///  limsup  max_position          predicted growth scale at n
///  slln    S_x                   x^{1-alpha}, or ln x when alpha = 1
///  moments mc_mean_S / mc_var_S  |E[S_x]| / V[S_x] from the exact sums
///  hitting *_hitting_time, *_bound  x^2
/// and 1 for z-scores and counts.
[[nodiscard]] double record_normalizer(ExperimentKind kind, const WalkConfig& cfg,
                                       std::uint64_t checkpoint,
                                       std::string_view statistic);

/// max_{m<=n} X_m per replica and checkpoint. Refuses transient configs.
void run_limsup_experiment(const ExperimentConfig& ecfg, const RecordSink& sink);
/// S_x per environment and checkpoint. Refuses delta = 0 and alpha > 1.
void run_slln_experiment(const ExperimentConfig& ecfg, const RecordSink& sink);
/// Monte Carlo mean/variance of S_x over environments against the exact
/// sums, with z-scores. One batch per grid point.
void run_moment_experiment(const ExperimentConfig& ecfg, const RecordSink& sink);
/// Per environment and checkpoint x: T(x), its bounds, and the Monte Carlo
/// mean of tau_x with its z-score and budget overruns.
void run_hitting_experiment(const ExperimentConfig& ecfg, const RecordSink& sink);

void run_experiment(const ExperimentConfig& ecfg, const RecordSink& sink);
[[nodiscard]] std::vector<ExperimentRecord> run_experiment(
    const ExperimentConfig& ecfg);

void write_records_csv_header(std::ostream& os);
void write_records_csv(std::ostream& os,
                       const std::vector<ExperimentRecord>& records);
void write_records_json(std::ostream& os,
                        const std::vector<ExperimentRecord>& records);

/// Least-squares slope of the across-replica mean of ln max_position
/// against ln n, over checkpoints in [n_last / 10, n_last].
[[nodiscard]] double fit_growth_exponent(
    const std::vector<ExperimentRecord>& limsup_records, const WalkConfig& cfg);
/// Largest ratio over all replicas and checkpoints of one grid point.
[[nodiscard]] double max_ratio(const std::vector<ExperimentRecord>& records,
                               const WalkConfig& cfg, std::string_view statistic);

/// Analytic SLLN limit: 1/K(alpha, delta) for alpha < 1, delta - 1 at 1.
[[nodiscard]] double slln_target(const WalkConfig& cfg);

struct ToleranceProfile {
  double special_functions = 1e-10;
  double equivalence = 1e-10;
  double martingale = 1e-12;
  double hitting_relative = 1e-9;
  unsigned max_depth = 10;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  [[nodiscard]] bool passed() const;
  [[nodiscard]] std::string to_json() const;
};

/// Deterministic invariant suite across all modules.
[[nodiscard]] VerifyReport verify_all(const ToleranceProfile& profile = {});

}  // namespace lerrw
