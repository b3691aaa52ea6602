#include "lerrw/analytic.hpp"
#include "lerrw/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

using namespace lerrw;

namespace {

std::string csv_of(const ExperimentConfig& e) {
  std::ostringstream os;
  write_records_csv_header(os);
  run_experiment(e, [&](const std::vector<ExperimentRecord>& batch) {
    write_records_csv(os, batch);
  });
  return os.str();
}

ExperimentConfig small_limsup() {
  ExperimentConfig e;
  e.kind = ExperimentKind::Limsup;
  e.grid = {{0.0, 1.0}, {1.0, 4.0}, {-2.0, 0.0}};
  e.seeds = 6;
  e.horizon = 20000;
  e.master_seed = 5;
  return e;
}

}  // namespace

TEST_CASE("names round-trip") {
  for (auto k : {ExperimentKind::Limsup, ExperimentKind::Slln,
                 ExperimentKind::Moments, ExperimentKind::Hitting})
    CHECK(parse_experiment_kind(to_string(k)) == k);
  CHECK(parse_output_format("json") == OutputFormat::Json);
  CHECK(parse_environment_source("unit") == EnvironmentSource::Unit);
  CHECK_THROWS_AS((void)parse_experiment_kind("growth"), ConfigError);
}

TEST_CASE("csv header is fixed") {
  std::ostringstream os;
  write_records_csv_header(os);
  CHECK(os.str() == "kind,alpha,delta,seed,checkpoint,statistic,value,normalizer,ratio\n");
  CHECK(kRecordCsvHeader == "kind,alpha,delta,seed,checkpoint,statistic,value,normalizer,ratio");
}

TEST_CASE("config validation") {
  ExperimentConfig e;
  CHECK_NOTHROW(e.validate());
  e.grid.clear();
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e = {};
  e.grid = {{1.5, 1.0}};
  CHECK_THROWS_AS(e.validate(), ConfigError);  // transient
  e.kind = ExperimentKind::Slln;
  e.grid = {{0.0, 0.0}};
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e.kind = ExperimentKind::Hitting;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e.environment = EnvironmentSource::Unit;
  CHECK_NOTHROW(e.validate());
  e = {};
  e.seeds = 0;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e = {};
  e.grid = {{0.0, -1.0}};
  CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("json config") {
  const auto c = config_from_json(R"({"kind": "slln", "grid": [{"alpha": 0.5, "delta": 2}],
      "seeds": 3, "horizon": 1000, "checkpoints": [10, 100, 5000], "format": "json"})");
  CHECK(c.kind == ExperimentKind::Slln);
  REQUIRE(c.grid.size() == 1);
  CHECK(c.grid[0].delta == 2.0);
  CHECK(c.seeds == 3);
  CHECK(c.master_seed == 1);
  CHECK(c.format == OutputFormat::Json);
  CHECK(c.schedule() == std::vector<std::uint64_t>{10, 100});

  CHECK_THROWS_AS((void)config_from_json(R"({"sedes": 3})"), ConfigError);
  CHECK_THROWS_AS((void)config_from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS((void)config_from_json("{"), ConfigError);
  CHECK_THROWS_AS((void)config_from_json(R"({"seeds": "many"})"), ConfigError);

  ExperimentConfig base;
  base.seeds = 99;
  CHECK(config_from_json("{}", base).seeds == 99);

  const auto back = config_from_json(config_to_json(c));
  CHECK(back.kind == c.kind);
  CHECK(back.grid[0].alpha == c.grid[0].alpha);
  CHECK(back.checkpoints == c.checkpoints);
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("replica seeds") {
  const WalkConfig a{0.0, 1.0}, b{0.0, 2.0};
  CHECK(replica_seed(1, a, 0) == replica_seed(1, a, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    seen.insert(replica_seed(1, a, r));
    seen.insert(replica_seed(1, b, r));
    seen.insert(replica_seed(2, a, r));
  }
  CHECK(seen.size() == 3000);
  CHECK(replica_seed(1, {-0.0, 1.0}, 4) == replica_seed(1, {0.0, 1.0}, 4));
}

TEST_CASE("limsup output is independent of worker count") {
  auto e = small_limsup();
  e.workers = 1;
  const auto one = csv_of(e);
  e.workers = 4;
  CHECK(csv_of(e) == one);
  e.workers = 16;
  CHECK(csv_of(e) == one);

  // A replica subset reproduces the matching rows.
  auto sub = small_limsup();
  sub.first_replica = 2;
  sub.seeds = 1;
  sub.grid = {{0.0, 1.0}};
  const auto rows = run_experiment(sub);
  const auto all = run_experiment(small_limsup());
  std::size_t matched = 0;
  for (const auto& r : rows)
    for (const auto& s : all)
      if (s.seed == r.seed && s.alpha == r.alpha && s.delta == r.delta &&
          s.checkpoint == r.checkpoint && s.value == r.value)
        ++matched;
  CHECK(matched == rows.size());
}

TEST_CASE("normalizers reproduce from the record alone") {
  ExperimentConfig lim = small_limsup();
  lim.seeds = 2;
  ExperimentConfig mom;
  mom.kind = ExperimentKind::Moments;
  mom.grid = {{0.5, 2.0}};
  mom.seeds = 2000;
  mom.horizon = 40;
  ExperimentConfig hit;
  hit.kind = ExperimentKind::Hitting;
  hit.environment = EnvironmentSource::Unit;
  hit.grid = {{0.0, 1.0}};
  hit.seeds = 1;
  hit.horizon = 4;
  hit.checkpoints = {2, 4};
  hit.walks_per_environment = 500;
  ExperimentConfig sl;
  sl.kind = ExperimentKind::Slln;
  sl.grid = {{0.0, 1.0}, {1.0, 3.0}};
  sl.seeds = 2;
  sl.horizon = 1000;
  for (const auto& e : {lim, mom, hit, sl})
    for (const auto& r : run_experiment(e)) {
      const double n = record_normalizer(r.kind, {r.alpha, r.delta}, r.checkpoint,
                                         r.statistic);
      CHECK(n == r.normalizer);
      CHECK(r.ratio == r.value / r.normalizer);
    }
}

TEST_CASE("experiment contents") {
  ExperimentConfig hit;
  hit.kind = ExperimentKind::Hitting;
  hit.environment = EnvironmentSource::Unit;
  hit.grid = {{0.0, 1.0}};
  hit.seeds = 1;
  hit.horizon = 3;
  hit.checkpoints = {3};
  hit.walks_per_environment = 20000;
  std::set<std::string> stats;
  for (const auto& r : run_experiment(hit)) {
    stats.insert(r.statistic);
    if (r.statistic == "expected_hitting_time") CHECK(r.value == doctest::Approx(9.0));
    if (r.statistic == "lower_bound") CHECK(r.value == doctest::Approx(3.0));
    if (r.statistic == "upper_bound") CHECK(r.value == doctest::Approx(18.0));
    if (r.statistic == "mc_hitting_z") CHECK(std::fabs(r.value) < 4.0);
    if (r.statistic == "budget_exceeded") CHECK(r.value == 0.0);
  }
  CHECK(stats.count("mc_hitting_time") == 1);

  ExperimentConfig mom;
  mom.kind = ExperimentKind::Moments;
  mom.grid = {{1.0, 1.0}};
  mom.seeds = 5000;
  mom.horizon = 50;
  mom.checkpoints = {50};
  for (const auto& r : run_experiment(mom)) {
    if (r.statistic == "mc_mean_S") CHECK(r.normalizer == doctest::Approx(std::log(4.0)));
    if (r.statistic == "mean_S_z" || r.statistic == "var_S_z") CHECK(std::fabs(r.value) < 4.5);
  }

  ExperimentConfig sl;
  sl.kind = ExperimentKind::Slln;
  sl.grid = {{0.0, 1.0}};
  sl.seeds = 3;
  sl.horizon = 100000;
  sl.checkpoints = {100000};
  for (const auto& r : run_experiment(sl))
    CHECK(std::fabs(r.ratio / slln_target({0.0, 1.0}) - 1) < 0.05);
  CHECK(slln_target({0.0, 1.0}) == doctest::Approx(std::log(4.0)));
  CHECK(slln_target({1.0, 3.0}) == 2.0);
}

TEST_CASE("growth summaries") {
  // Synthetic records with exact power growth.
  std::vector<ExperimentRecord> recs;
  const WalkConfig cfg{1.0, 4.0};
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    for (std::uint64_t n : {1000u, 3000u, 10000u}) {
      ExperimentRecord r;
      r.kind = ExperimentKind::Limsup;
      r.alpha = cfg.alpha;
      r.delta = cfg.delta;
      r.seed = seed;
      r.checkpoint = n;
      r.statistic = "max_position";
      r.value = (seed + 1) * std::pow(double(n), 0.25);
      r.normalizer = 1.0;
      r.ratio = r.value + seed;
      recs.push_back(r);
    }
  CHECK(fit_growth_exponent(recs, cfg) == doctest::Approx(0.25));
  CHECK(max_ratio(recs, cfg, "max_position") ==
        doctest::Approx(3 * std::pow(1e4, 0.25) + 2));
}

TEST_CASE("json records") {
  auto e = small_limsup();
  e.seeds = 1;
  e.grid = {{0.0, 1.0}};
  std::ostringstream os;
  write_records_json(os, run_experiment(e));
  const auto j = nlohmann::json::parse(os.str());
  REQUIRE(j.is_array());
  CHECK(j.size() == e.schedule().size());
  CHECK(j[0]["statistic"] == "max_position");
}

TEST_CASE("verification suite passes") {
  const auto report = verify_all();
  for (const auto& c : report.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
  CHECK(report.passed());
  CHECK(nlohmann::json::parse(report.to_json()).contains("checks"));
}
