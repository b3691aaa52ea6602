#include "lerrw/harness.hpp"

#include "lerrw/analytic.hpp"
#include "lerrw/environment.hpp"
#include "lerrw/random.hpp"
#include "lerrw/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace lerrw {
namespace {

using nlohmann::json;

template <class E>
struct NameTable {
  E value;
  std::string_view name;
};

constexpr NameTable<ExperimentKind> kKinds[] = {
    {ExperimentKind::Limsup, "limsup"},
    {ExperimentKind::Slln, "slln"},
    {ExperimentKind::Moments, "moments"},
    {ExperimentKind::Hitting, "hitting"},
};
constexpr NameTable<OutputFormat> kFormats[] = {
    {OutputFormat::Csv, "csv"},
    {OutputFormat::Json, "json"},
};
constexpr NameTable<EnvironmentSource> kSources[] = {
    {EnvironmentSource::Sampled, "sampled"},
    {EnvironmentSource::Unit, "unit"},
};

template <class E, std::size_t N>
std::string_view name_of(const NameTable<E> (&table)[N], E v) noexcept {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <class E, std::size_t N>
E parse_name(const NameTable<E> (&table)[N], std::string_view s,
             const char* what) {
  for (const auto& e : table)
    if (e.name == s) return e.value;
  std::string msg = std::string("unknown ") + what + " '" + std::string(s) +
                    "' (expected one of:";
  for (const auto& e : table) msg += " " + std::string(e.name);
  throw ConfigError(msg + ")");
}

// Runs items [0, count) on `workers` threads and hands each item's records
// to the sink in index order as soon as every earlier item has finished.
void run_ordered(std::size_t count, unsigned workers,
                 const std::function<std::vector<ExperimentRecord>(std::size_t)>& item,
                 const RecordSink& sink) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) sink(item(i));
    return;
  }
  std::vector<std::optional<std::vector<ExperimentRecord>>> done(count);
  std::size_t flushed = 0;
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      std::vector<ExperimentRecord> recs;
      try {
        recs = item(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
      std::lock_guard lock(mu);
      if (failure) return;
      done[i] = std::move(recs);
      while (flushed < count && done[flushed]) {
        sink(*done[flushed]);
        done[flushed].reset();
        ++flushed;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentRecord make_record(ExperimentKind kind, const WalkConfig& cfg,
                             std::uint64_t seed, std::uint64_t checkpoint,
                             std::string statistic, double value) {
  ExperimentRecord r;
  r.kind = kind;
  r.alpha = cfg.alpha;
  r.delta = cfg.delta;
  r.seed = seed;
  r.checkpoint = checkpoint;
  r.normalizer = record_normalizer(kind, cfg, checkpoint, statistic);
  r.statistic = std::move(statistic);
  r.value = value;
  r.ratio = value / r.normalizer;
  return r;
}

void require_grid(const ExperimentConfig& e, bool (*ok)(const WalkConfig&),
                  const char* why) {
  for (const auto& c : e.grid)
    if (!ok(c))
      throw ConfigError(std::string(to_string(e.kind)) + " experiment refused for alpha=" +
                        std::to_string(c.alpha) + ", delta=" + std::to_string(c.delta) +
                        ": " + why);
}

std::uint64_t double_key(double v) noexcept {
  if (v == 0.0) v = 0.0;  // fold -0.0
  return std::bit_cast<std::uint64_t>(v);
}

double square(double v) { return v * v; }

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept { return name_of(kKinds, k); }
std::string_view to_string(OutputFormat f) noexcept { return name_of(kFormats, f); }
std::string_view to_string(EnvironmentSource s) noexcept { return name_of(kSources, s); }

ExperimentKind parse_experiment_kind(std::string_view s) {
  return parse_name(kKinds, s, "experiment kind");
}
OutputFormat parse_output_format(std::string_view s) {
  return parse_name(kFormats, s, "format");
}
EnvironmentSource parse_environment_source(std::string_view s) {
  return parse_name(kSources, s, "environment source");
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw ConfigError("grid must contain at least one (alpha, delta)");
  for (const auto& c : grid) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (seeds < 1) throw ConfigError("seeds (replica count) must be >= 1");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(checkpoint_base > 0.0) || !std::isfinite(checkpoint_base))
    throw ConfigError("checkpoint_base must be positive");
  if (kind == ExperimentKind::Hitting && walks_per_environment < 1)
    throw ConfigError("walks_per_environment must be >= 1");
  if (kind == ExperimentKind::Hitting && hit_budget < 1)
    throw ConfigError("hit_budget must be >= 1");
  if (schedule().empty())
    throw ConfigError("no usable checkpoint in [1, horizon]");
  switch (kind) {
    case ExperimentKind::Limsup:
      require_grid(*this, [](const WalkConfig& c) { return c.alpha <= 1.0; },
                   "the walk is transient (alpha > 1), so no growth law applies");
      if (horizon < 2) throw ConfigError("limsup experiment needs horizon >= 2");
      break;
    case ExperimentKind::Slln:
      require_grid(*this, [](const WalkConfig& c) { return c.delta > 0.0 && c.alpha <= 1.0; },
                   "needs delta > 0 and alpha <= 1");
      break;
    case ExperimentKind::Moments:
      require_grid(*this, [](const WalkConfig& c) { return c.delta > 0.0; }, "needs delta > 0");
      break;
    case ExperimentKind::Hitting:
      if (environment == EnvironmentSource::Sampled)
        require_grid(*this, [](const WalkConfig& c) { return c.delta > 0.0; },
                     "a sampled environment needs delta > 0");
      break;
  }
}

std::vector<std::uint64_t> ExperimentConfig::schedule() const {
  std::vector<std::uint64_t> s;
  if (checkpoints.empty()) {
    s = geometric_checkpoints(horizon, checkpoint_base);
  } else {
    for (auto c : checkpoints)
      if (c >= 1 && c <= horizon) s.push_back(c);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return s;
}

ExperimentConfig config_from_json(std::string_view text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = std::move(base);
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "kind") {
        c.kind = parse_experiment_kind(v.get<std::string>());
      } else if (key == "grid") {
        c.grid.clear();
        for (const auto& g : v) {
          WalkConfig w;
          w.alpha = g.at("alpha").get<double>();
          w.delta = g.at("delta").get<double>();
          c.grid.push_back(w);
        }
      } else if (key == "master_seed") {
        c.master_seed = v.get<std::uint64_t>();
      } else if (key == "seeds") {
        c.seeds = v.get<std::uint64_t>();
      } else if (key == "first_replica") {
        c.first_replica = v.get<std::uint64_t>();
      } else if (key == "horizon") {
        c.horizon = v.get<std::uint64_t>();
      } else if (key == "checkpoints") {
        c.checkpoints = v.get<std::vector<std::uint64_t>>();
      } else if (key == "checkpoint_base") {
        c.checkpoint_base = v.get<double>();
      } else if (key == "environment") {
        c.environment = parse_environment_source(v.get<std::string>());
      } else if (key == "walks_per_environment") {
        c.walks_per_environment = v.get<std::uint64_t>();
      } else if (key == "hit_budget") {
        c.hit_budget = v.get<std::uint64_t>();
      } else if (key == "workers") {
        c.workers = v.get<unsigned>();
      } else if (key == "out") {
        c.out_path = v.get<std::string>();
      } else if (key == "format") {
        c.format = parse_output_format(v.get<std::string>());
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.kind);
  j["grid"] = nlohmann::ordered_json::array();
  for (const auto& g : c.grid) j["grid"].push_back({{"alpha", g.alpha}, {"delta", g.delta}});
  j["master_seed"] = c.master_seed;
  j["seeds"] = c.seeds;
  j["first_replica"] = c.first_replica;
  j["horizon"] = c.horizon;
  j["checkpoints"] = c.checkpoints;
  j["checkpoint_base"] = c.checkpoint_base;
  j["environment"] = to_string(c.environment);
  j["walks_per_environment"] = c.walks_per_environment;
  j["hit_budget"] = c.hit_budget;
  j["workers"] = c.workers;
  j["out"] = c.out_path;
  j["format"] = to_string(c.format);
  return j.dump(2);
}

std::uint64_t replica_seed(std::uint64_t master, const WalkConfig& cfg,
                           std::uint64_t replica) noexcept {
  const std::uint64_t key =
      splitmix64(double_key(cfg.alpha)) ^ std::rotl(splitmix64(double_key(cfg.delta)), 17);
  return derive_seed(derive_seed(master, key), replica);
}

double record_normalizer(ExperimentKind kind, const WalkConfig& cfg,
                         std::uint64_t checkpoint, std::string_view statistic) {
  const auto x = static_cast<double>(checkpoint);
  switch (kind) {
    case ExperimentKind::Limsup:
      if (statistic == "max_position") return predict_scaling(cfg).normalizer(x);
      break;
    case ExperimentKind::Slln:
      if (statistic == "S_x")
        return cfg.alpha == 1.0 ? std::log(x) : std::pow(x, 1.0 - cfg.alpha);
      break;
    case ExperimentKind::Moments:
      if (statistic == "mc_mean_S") {
        const double m = std::abs(mean_S(cfg, checkpoint));
        return m > 0.0 ? m : 1.0;
      }
      if (statistic == "mc_var_S") return var_S(cfg, checkpoint);
      break;
    case ExperimentKind::Hitting:
      if (statistic.ends_with("hitting_time") || statistic.ends_with("bound"))
        return x * x;
      break;
  }
  return 1.0;
}

double slln_target(const WalkConfig& cfg) {
  if (cfg.alpha == 1.0) return cfg.delta - 1.0;
  return 1.0 / k_constant(cfg.alpha, cfg.delta);
}

// ---- experiments -------------------------------------------------------------

void run_limsup_experiment(const ExperimentConfig& e, const RecordSink& sink) {
  e.validate();
  std::vector<std::uint64_t> sched;
  for (auto n : e.schedule())
    if (n >= 2) sched.push_back(n);
  const std::size_t per = e.seeds;
  run_ordered(e.grid.size() * per, e.workers, [&](std::size_t item) {
    const WalkConfig& cfg = e.grid[item / per];
    const std::uint64_t replica = e.first_replica + item % per;
    const Trajectory t =
        lerrw_run(cfg, replica_seed(e.master_seed, cfg, replica), sched.back(), sched);
    std::vector<ExperimentRecord> out;
    for (const auto& c : t.checkpoints)
      out.push_back(make_record(e.kind, cfg, replica, c.n, "max_position",
                                static_cast<double>(c.max_position)));
    return out;
  }, sink);
}

void run_slln_experiment(const ExperimentConfig& e, const RecordSink& sink) {
  e.validate();
  const auto sched = e.schedule();
  const std::size_t per = e.seeds;
  run_ordered(e.grid.size() * per, e.workers, [&](std::size_t item) {
    const WalkConfig& cfg = e.grid[item / per];
    const std::uint64_t replica = e.first_replica + item % per;
    LogResistanceStream stream(cfg, replica_seed(e.master_seed, cfg, replica));
    std::vector<ExperimentRecord> out;
    for (auto x : sched) {
      const double s = stream.advance_to(x);
      if (cfg.alpha == 1.0 && x < 2) continue;  // ln 1 = 0
      out.push_back(make_record(e.kind, cfg, replica, x, "S_x", s));
    }
    return out;
  }, sink);
}

void run_moment_experiment(const ExperimentConfig& e, const RecordSink& sink) {
  e.validate();
  const auto sched = e.schedule();
  const std::size_t per = e.seeds;
  // Fixed-size chunks keep the work split independent of the worker count.
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (per + kChunk - 1) / kChunk;
  for (const WalkConfig& cfg : e.grid) {
    std::vector<double> samples(per * sched.size());
    run_ordered(chunks, e.workers, [&](std::size_t chunk) {
      const std::size_t lo = chunk * kChunk;
      const std::size_t hi = std::min(per, lo + kChunk);
      for (std::size_t r = lo; r < hi; ++r) {
        LogResistanceStream stream(cfg, replica_seed(e.master_seed, cfg, e.first_replica + r));
        for (std::size_t k = 0; k < sched.size(); ++k)
          samples[k * per + r] = stream.advance_to(sched[k]);
      }
      return std::vector<ExperimentRecord>{};
    }, [](const std::vector<ExperimentRecord>&) {});

    std::vector<ExperimentRecord> out;
    const auto n = static_cast<double>(per);
    for (std::size_t k = 0; k < sched.size(); ++k) {
      const double* s = &samples[k * per];
      double mean = 0.0;
      for (std::size_t r = 0; r < per; ++r) mean += s[r];
      mean /= n;
      double m2 = 0.0;
      double m4 = 0.0;
      for (std::size_t r = 0; r < per; ++r) {
        const double d2 = square(s[r] - mean);
        m2 += d2;
        m4 += d2 * d2;
      }
      const double var = per > 1 ? m2 / (n - 1.0) : 0.0;
      m2 /= n;
      m4 /= n;
      const double se_mean = std::sqrt(var / n);
      const double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
      const MomentPair exact = moments_S(cfg, sched[k]);
      const std::uint64_t x = sched[k];
      out.push_back(make_record(e.kind, cfg, e.master_seed, x, "mc_mean_S", mean));
      out.push_back(make_record(e.kind, cfg, e.master_seed, x, "mc_var_S", var));
      out.push_back(make_record(e.kind, cfg, e.master_seed, x, "mean_S_z",
                                se_mean > 0.0 ? (mean - exact.mean) / se_mean : 0.0));
      out.push_back(make_record(e.kind, cfg, e.master_seed, x, "var_S_z",
                                se_var > 0.0 ? (var - exact.variance) / se_var : 0.0));
    }
    sink(out);
  }
}

void run_hitting_experiment(const ExperimentConfig& e, const RecordSink& sink) {
  e.validate();
  const auto sched = e.schedule();
  const std::vector<Vertex> targets(sched.begin(), sched.end());
  const std::size_t per = e.seeds;
  run_ordered(e.grid.size() * per, e.workers, [&](std::size_t item) {
    const WalkConfig& cfg = e.grid[item / per];
    const std::uint64_t replica = e.first_replica + item % per;
    const std::uint64_t seed = replica_seed(e.master_seed, cfg, replica);
    Environment env = e.environment == EnvironmentSource::Unit
                          ? Environment::unit()
                          : Environment::sampled(cfg, seed);
    env.extend_to(targets.back());
    const Environment& view = env;

    const std::size_t m = targets.size();
    std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
    std::vector<std::uint64_t> hits(m, 0), missed(m, 0);
    const std::uint64_t walk_root = splitmix64(seed ^ 0x6A09E667F3BCC909ULL);
    for (std::uint64_t w = 0; w < e.walks_per_environment; ++w) {
      const auto taus = quenched_hit_times(view, derive_seed(walk_root, w), targets, e.hit_budget);
      for (std::size_t k = 0; k < m; ++k) {
        if (taus[k]) {
          const auto t = static_cast<double>(*taus[k]);
          sum[k] += t;
          sum_sq[k] += t * t;
          ++hits[k];
        } else {
          ++missed[k];
        }
      }
    }

    std::vector<ExperimentRecord> out;
    for (std::size_t k = 0; k < m; ++k) {
      const Vertex x = targets[k];
      const double exact = view.expected_hitting_time(x);
      const HittingBounds b = view.hitting_bounds(x, x - 1);
      out.push_back(make_record(e.kind, cfg, replica, x, "expected_hitting_time", exact));
      out.push_back(make_record(e.kind, cfg, replica, x, "lower_bound", b.lower()));
      out.push_back(make_record(e.kind, cfg, replica, x, "upper_bound", b.upper()));
      if (b.upper_posrec())
        out.push_back(make_record(e.kind, cfg, replica, x, "upper_posrec_bound", *b.upper_posrec()));
      const auto h = static_cast<double>(hits[k]);
      if (hits[k] > 0) {
        const double mean = sum[k] / h;
        const double var = hits[k] > 1 ? std::max(0.0, (sum_sq[k] - h * mean * mean) / (h - 1.0)) : 0.0;
        const double se = std::sqrt(var / h);
        out.push_back(make_record(e.kind, cfg, replica, x, "mc_hitting_time", mean));
        out.push_back(make_record(e.kind, cfg, replica, x, "mc_hitting_z",
                                  se > 0.0 ? (mean - exact) / se : 0.0));
      }
      out.push_back(make_record(e.kind, cfg, replica, x, "budget_exceeded",
                                static_cast<double>(missed[k])));
    }
    return out;
  }, sink);
}

void run_experiment(const ExperimentConfig& e, const RecordSink& sink) {
  switch (e.kind) {
    case ExperimentKind::Limsup: return run_limsup_experiment(e, sink);
    case ExperimentKind::Slln: return run_slln_experiment(e, sink);
    case ExperimentKind::Moments: return run_moment_experiment(e, sink);
    case ExperimentKind::Hitting: return run_hitting_experiment(e, sink);
  }
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& e) {
  std::vector<ExperimentRecord> all;
  run_experiment(e, [&](const std::vector<ExperimentRecord>& batch) {
    all.insert(all.end(), batch.begin(), batch.end());
  });
  return all;
}

// ---- output ------------------------------------------------------------------

void write_records_csv_header(std::ostream& os) { os << kRecordCsvHeader << '\n'; }

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%llu,%llu,%s,%.17g,%.17g,%.17g\n",
                  std::string(to_string(r.kind)).c_str(), r.alpha, r.delta,
                  static_cast<unsigned long long>(r.seed),
                  static_cast<unsigned long long>(r.checkpoint), r.statistic.c_str(),
                  r.value, r.normalizer, r.ratio);
    os << buf;
  }
}

void write_records_json(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(r.kind);
    j["alpha"] = r.alpha;
    j["delta"] = r.delta;
    j["seed"] = r.seed;
    j["checkpoint"] = r.checkpoint;
    j["statistic"] = r.statistic;
    j["value"] = r.value;
    j["normalizer"] = r.normalizer;
    j["ratio"] = r.ratio;
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << '\n';
}

// ---- summaries ---------------------------------------------------------------

double fit_growth_exponent(const std::vector<ExperimentRecord>& records,
                           const WalkConfig& cfg) {
  std::map<std::uint64_t, std::pair<double, std::size_t>> by_n;
  for (const auto& r : records)
    if (r.kind == ExperimentKind::Limsup && r.statistic == "max_position" &&
        r.alpha == cfg.alpha && r.delta == cfg.delta) {
      auto& [s, c] = by_n[r.checkpoint];
      s += std::log(r.value);
      ++c;
    }
  if (by_n.empty()) throw std::invalid_argument("fit_growth_exponent: no records");
  const double last = static_cast<double>(by_n.rbegin()->first);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& [n, sc] : by_n) {
    if (10.0 * static_cast<double>(n) < last) continue;
    const double x = std::log(static_cast<double>(n));
    const double y = sc.first / static_cast<double>(sc.second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("fit_growth_exponent: fewer than two checkpoints in the last decade");
  const auto md = static_cast<double>(m);
  return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

double max_ratio(const std::vector<ExperimentRecord>& records, const WalkConfig& cfg,
                 std::string_view statistic) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : records)
    if (r.statistic == statistic && r.alpha == cfg.alpha && r.delta == cfg.delta)
      best = std::max(best, r.ratio);
  return best;
}

}  // namespace lerrw
