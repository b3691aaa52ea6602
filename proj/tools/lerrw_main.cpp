// Command-line front end: simulate, enumerate, constants, environment,
// experiment {limsup|slln|moments|hitting}, verify.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid configuration.

#include "lerrw/analytic.hpp"
#include "lerrw/environment.hpp"
#include "lerrw/harness.hpp"
#include "lerrw/oracle.hpp"
#include "lerrw/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace lerrw;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadConfig = 2;

struct Options {
  std::vector<double> alpha{0.0};
  std::vector<double> delta{1.0};
  std::uint64_t steps = 1'000'000;
  std::uint64_t sites = 1000;
  std::uint64_t seeds = 10;
  std::uint64_t master_seed = 1;
  std::vector<std::uint64_t> checkpoints;
  double checkpoint_base = 16.0;
  std::string out;
  std::string format = "csv";
  bool exact = false;
  bool quenched = false;
  std::string config;
  unsigned workers = 1;
  std::string environment = "sampled";
  std::uint64_t walks = 2000;
  std::uint64_t first_replica = 0;
};

std::vector<WalkConfig> grid_of(const Options& o) {
  std::vector<WalkConfig> g;
  for (double a : o.alpha)
    for (double d : o.delta) {
      WalkConfig c{a, d};
      try {
        c.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      g.push_back(c);
    }
  return g;
}

// Output goes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_simulate(const Options& o) {
  const auto format = parse_output_format(o.format);
  if (o.steps < 1) throw ConfigError("--steps must be >= 1");
  if (o.seeds < 1) throw ConfigError("--seeds must be >= 1");
  const auto schedule =
      o.checkpoints.empty() ? geometric_checkpoints(o.steps, o.checkpoint_base) : o.checkpoints;
  Output out(o.out);
  auto& os = out.stream();
  nlohmann::json summaries = nlohmann::json::array();
  bool header = true;
  RunOptions opts;
  opts.record_returns = format == OutputFormat::Json;
  for (const auto& cfg : grid_of(o)) {
    if (o.quenched && !(cfg.delta > 0.0))
      throw ConfigError("--quenched needs delta > 0 (Beta environment)");
    for (std::uint64_t r = o.first_replica; r < o.first_replica + o.seeds; ++r) {
      const std::uint64_t seed = replica_seed(o.master_seed, cfg, r);
      Trajectory t;
      if (o.quenched) {
        Environment env = Environment::sampled(cfg, seed);
        t = quenched_run(env, splitmix64(seed), o.steps, schedule, opts);
      } else {
        t = lerrw_run(cfg, seed, o.steps, schedule, opts);
      }
      t.seed = r;
      if (format == OutputFormat::Csv) {
        write_trajectory_csv(os, t, header);
        header = false;
      } else {
        auto j = nlohmann::json::parse(trajectory_summary_json(t));
        j["alpha"] = cfg.alpha;
        j["delta"] = cfg.delta;
        j["walk"] = o.quenched ? "quenched" : "reinforced";
        summaries.push_back(std::move(j));
      }
    }
  }
  if (format == OutputFormat::Json) os << summaries.dump(2) << '\n';
  return kExitOk;
}

int cmd_enumerate(const Options& o) {
  const auto format = parse_output_format(o.format);
  if (o.steps > kMaxEnumerationDepth)
    throw ConfigError("--steps must be <= " + std::to_string(kMaxEnumerationDepth) +
                      " for enumeration");
  const auto grid = grid_of(o);
  if (grid.size() != 1) throw ConfigError("enumerate takes a single --alpha and --delta");
  const auto mode = o.exact ? ArithmeticMode::Auto : ArithmeticMode::Float;
  const PathDistribution dist = enumerate_lerrw(grid[0], static_cast<unsigned>(o.steps), mode);
  Output out(o.out);
  auto& os = out.stream();
  if (format == OutputFormat::Json) {
    write_path_distribution_json(os, dist);
  } else {
    os << "path,probability,exact\n";
    char buf[64];
    for (const auto& e : dist.entries) {
      std::snprintf(buf, sizeof buf, "%.17g", e.probability.value);
      os << '"' << path_string(decode_path(e.moves, dist.horizon)) << "\"," << buf << ','
         << e.probability.exact.value_or("") << '\n';
    }
  }
  return kExitOk;
}

int cmd_constants(const Options& o) {
  const auto format = parse_output_format(o.format);
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const auto& cfg : grid_of(o)) {
    nlohmann::ordered_json j;
    j["alpha"] = cfg.alpha;
    j["delta"] = cfg.delta;
    const Classification cl = classify(cfg, o.sites);
    j["recurrence"] = to_string(cl.verdict);
    j["f0_partial_sum"] = cl.partial_f0_sum;
    j["f0_partial_cutoff"] = cl.cutoff;
    if (cfg.alpha < 1.0 && cfg.delta > 0.0) j["k_constant"] = k_constant(cfg.alpha, cfg.delta);
    if (cl.verdict == Recurrence::Recurrent) {
      const ScalingLaw law = predict_scaling(cfg);
      j["scaling_law"] = law.describe();
      j["scaling_exponent"] = law.exponent;
    }
    if (cfg.delta > 0.0) {
      j["normalizer_summable"] = normalizer_summable(cfg);
      j["sites"] = o.sites;
      const MomentPair m = moments_S(cfg, o.sites);
      j["mean_S"] = m.mean;
      j["var_S"] = m.variance;
      if (cfg.alpha <= 1.0) {
        j["mean_S_asymptotic"] = mean_S_asymptotic(cfg, static_cast<double>(o.sites));
        j["var_S_asymptotic"] = var_S_asymptotic(cfg, static_cast<double>(o.sites));
        j["slln_target"] = slln_target(cfg);
      }
    }
    all.push_back(std::move(j));
  }
  Output out(o.out);
  auto& os = out.stream();
  if (format == OutputFormat::Json) {
    os << all.dump(2) << '\n';
  } else {
    os << "alpha,delta,quantity,value\n";
    for (const auto& j : all)
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "alpha" || it.key() == "delta") continue;
        os << j["alpha"].dump() << ',' << j["delta"].dump() << ',' << it.key() << ','
           << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
      }
  }
  return kExitOk;
}

int cmd_environment(const Options& o) {
  const auto grid = grid_of(o);
  if (grid.size() != 1) throw ConfigError("environment takes a single --alpha and --delta");
  if (!(grid[0].delta > 0.0)) throw ConfigError("the Beta environment needs delta > 0");
  Environment env = Environment::sampled(grid[0], o.master_seed);
  Output out(o.out);
  env.write_csv(out.stream(), o.sites);
  return kExitOk;
}

int cmd_experiment(const std::string& kind, const Options& o, const CLI::App& sub) {
  ExperimentConfig e;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config file '" + o.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    e = config_from_json(ss.str(), e);
  }
  e.kind = parse_experiment_kind(kind);
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--alpha") || given("--delta") || o.config.empty()) {
    Options g = o;
    if (!given("--alpha") && !o.config.empty()) {
      g.alpha.clear();
      for (const auto& c : e.grid) g.alpha.push_back(c.alpha);
    }
    if (!given("--delta") && !o.config.empty()) {
      g.delta.clear();
      for (const auto& c : e.grid) g.delta.push_back(c.delta);
    }
    e.grid = grid_of(g);
  }
  if (given("--master-seed") || o.config.empty()) e.master_seed = o.master_seed;
  if (given("--seeds") || o.config.empty()) e.seeds = o.seeds;
  if (given("--first-replica")) e.first_replica = o.first_replica;
  const bool walk_horizon = e.kind == ExperimentKind::Limsup;
  if (walk_horizon && (given("--steps") || o.config.empty())) e.horizon = o.steps;
  if (!walk_horizon && (given("--sites") || o.config.empty())) e.horizon = o.sites;
  if (given("--checkpoints")) e.checkpoints = o.checkpoints;
  if (given("--checkpoint-base")) e.checkpoint_base = o.checkpoint_base;
  if (given("--environment")) e.environment = parse_environment_source(o.environment);
  if (given("--walks")) e.walks_per_environment = o.walks;
  if (given("--workers")) e.workers = o.workers;
  if (given("--out")) e.out_path = o.out;
  if (given("--format") || o.config.empty()) e.format = parse_output_format(o.format);
  e.validate();

  Output out(e.out_path);
  auto& os = out.stream();
  if (e.format == OutputFormat::Csv) {
    write_records_csv_header(os);
    os.flush();
    run_experiment(e, [&](const std::vector<ExperimentRecord>& batch) {
      write_records_csv(os, batch);
      os.flush();
    });
  } else {
    write_records_json(os, run_experiment(e));
  }
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const VerifyReport report = verify_all();
  Output out(o.out);
  out.stream() << report.to_json() << '\n';
  for (const auto& c : report.checks)
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << c.measured
              << " threshold=" << c.threshold << '\n';
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--alpha", o.alpha, "Initial-weight exponent (repeatable for a grid)");
  app->add_option("--delta", o.delta, "Reinforcement increment (repeatable for a grid)");
  app->add_option("--steps", o.steps, "Walk length / enumeration depth");
  app->add_option("--sites", o.sites, "Site horizon x");
  app->add_option("--seeds", o.seeds, "Replica count");
  app->add_option("--master-seed", o.master_seed, "Master seed");
  app->add_option("--checkpoints", o.checkpoints, "Explicit checkpoints (comma separated)")
      ->delimiter(',');
  app->add_option("--checkpoint-base", o.checkpoint_base,
                  "Base c of the ceil(c * 1.5^k) schedule");
  app->add_option("--out", o.out, "Output path (default stdout)");
  app->add_option("--format", o.format, "csv or json");
  app->add_flag("--exact", o.exact, "Rational arithmetic where applicable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearly edge-reinforced random walks on the half-line"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Run reinforced (or quenched) walks");
  add_common(simulate, o);
  simulate->add_flag("--quenched", o.quenched, "Walk in a sampled Beta environment instead");
  simulate->add_option("--first-replica", o.first_replica, "First replica index");

  auto* enumerate = app.add_subcommand("enumerate", "Exact path law by enumeration");
  add_common(enumerate, o);

  auto* constants = app.add_subcommand("constants", "Analytic constants and moments");
  add_common(constants, o);

  auto* environment = app.add_subcommand("environment", "Export a sampled environment");
  add_common(environment, o);

  auto* experiment = app.add_subcommand("experiment", "Run an experiment");
  experiment->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> kinds;
  for (const char* k : {"limsup", "slln", "moments", "hitting"}) {
    auto* sub = experiment->add_subcommand(k, std::string(k) + " experiment");
    add_common(sub, o);
    sub->add_option("--config", o.config, "JSON config; flags override its values");
    sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    sub->add_option("--first-replica", o.first_replica, "First replica index");
    sub->add_option("--environment", o.environment, "sampled or unit (hitting)");
    sub->add_option("--walks", o.walks, "Walks per environment (hitting)");
    kinds.emplace_back(k, sub);
  }

  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--out", o.out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*enumerate) return cmd_enumerate(o);
    if (*constants) return cmd_constants(o);
    if (*environment) return cmd_environment(o);
    if (*verify) return cmd_verify(o);
    for (const auto& [name, sub] : kinds)
      if (*sub) return cmd_experiment(name, o, *sub);
  } catch (const std::exception& e) {
    // Config errors, domain/size errors from the library, unwritable output.
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  return kExitBadConfig;
}
