#include "lerrw/oracle.hpp"
#include "lerrw/simulator.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

using namespace lerrw;

namespace {

WalkState state_after(const Path& path) {
  WalkState s;
  for (std::size_t k = 1; k < path.size(); ++k)
    s.apply(path[k] > path[k - 1] ? +1 : -1);
  return s;
}

struct Mean {
  double sum = 0, sum2 = 0;
  std::uint64_t n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt((sum2 / n - mean() * mean()) / n); }
};

// Each path's empirical frequency against its exact probability, 4 SE.
void check_frequencies(const PathDistribution& exact,
                       const std::map<std::uint32_t, std::uint64_t>& counts,
                       std::uint64_t total) {
  for (const auto& e : exact.entries) {
    const double p = e.probability.value;
    const auto it = counts.find(e.moves);
    const double f = it == counts.end() ? 0.0 : double(it->second) / total;
    const double se = std::sqrt(p * (1 - p) / total);
    CAPTURE(path_string(decode_path(e.moves, exact.horizon)));
    CHECK(std::fabs(f - p) <= 4 * se + 1e-12);
  }
  std::uint64_t seen = 0;
  for (const auto& [moves, c] : counts) {
    CHECK(exact.find(decode_path(moves, exact.horizon)) != nullptr);
    seen += c;
  }
  CHECK(seen == total);
}

}  // namespace

TEST_CASE("step probabilities") {
  const WalkConfig cfg{0.0, 1.0};
  WalkState origin;
  CHECK(up_probability(cfg, origin) == 1.0);
  CHECK(up_probability(cfg, state_after({0, 1})) == doctest::Approx(1.0 / 3));
  CHECK(1.0 - up_probability(cfg, state_after({0, 1, 0, 1})) ==
        doctest::Approx(4.0 / 5));
  // Unreinforced walk with flat weights is symmetric.
  CHECK(up_probability({0.0, 0.0}, state_after({0, 1, 2, 1})) == 0.5);
}

TEST_CASE("forced first step") {
  const auto t = lerrw_run({0.3, 1.7}, 5, 1, {});
  REQUIRE(t.checkpoints.size() == 1);
  CHECK(t.checkpoints[0].n == 1);
  CHECK(t.checkpoints[0].position == 1);
  CHECK(t.checkpoints[0].max_position == 1);
}

TEST_CASE("walker matches the reference step") {
  for (const WalkConfig cfg : {WalkConfig{0.0, 1.0}, WalkConfig{1.0, 4.0},
                               WalkConfig{-2.0, 0.0}, WalkConfig{0.5, 0.5}}) {
    Rng r1(17), r2(17);
    LerrwWalker walker(cfg);
    WalkState ref;
    for (int k = 0; k < 20000; ++k) {
      const int a = walker.step(r1);
      const int b = lerrw_step(cfg, ref, r2);
      if (a != b) {
        FAIL("walkers diverged at step " << k);
        break;
      }
    }
    CHECK(walker.state().position == ref.position);
    CHECK(walker.state().max_position == ref.max_position);
    CHECK(walker.state().first_return == ref.first_return);
  }
}

TEST_CASE("checkpoint schedule") {
  const auto s = geometric_checkpoints(1000);
  REQUIRE_FALSE(s.empty());
  CHECK(s.front() == 16);
  CHECK(s[1] == 24);
  CHECK(s.back() == 1000);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  CHECK(geometric_checkpoints(10) == std::vector<std::uint64_t>{10});

  const auto t = lerrw_run({0.0, 1.0}, 1, 100, {5, 50, 500, 0});
  REQUIRE(t.checkpoints.size() == 2);
  CHECK(t.checkpoints[0].n == 5);
  CHECK(t.checkpoints[1].n == 50);
}

TEST_CASE("path 0,1,0 has probability 2/3") {
  const WalkConfig cfg{0.0, 1.0};
  const int n = 1'000'000;
  int hits = 0;
  for (int r = 0; r < n; ++r) {
    Rng rng(derive_seed(2024, r));
    WalkState s;
    lerrw_step(cfg, s, rng);
    lerrw_step(cfg, s, rng);
    hits += s.position == 0;
  }
  const double p = 2.0 / 3;
  CHECK(std::fabs(double(hits) / n - p) < 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("empirical path law matches exact enumeration") {
  const unsigned horizon = 6;
  const std::uint64_t reps = 1'000'000;
  for (const WalkConfig cfg : {WalkConfig{0.0, 1.0}, WalkConfig{1.0, 2.0},
                               WalkConfig{-1.0, 0.5}}) {
    const auto exact = enumerate_lerrw(cfg, horizon);
    std::map<std::uint32_t, std::uint64_t> counts;
    LerrwWalker proto(cfg);
    for (std::uint64_t r = 0; r < reps; ++r) {
      Rng rng(derive_seed(7, r));
      LerrwWalker w = proto;
      std::uint32_t moves = 0;
      for (unsigned k = 0; k < horizon; ++k)
        if (w.step(rng) > 0) moves |= 1u << k;
      ++counts[moves];
    }
    CAPTURE(cfg.alpha);
    CAPTURE(cfg.delta);
    check_frequencies(exact, counts, reps);
  }
}

TEST_CASE("quenched walks averaged over environments give the reinforced law") {
  const WalkConfig cfg{0.0, 1.0};
  const unsigned horizon = 5;
  const std::uint64_t envs = 1000, walks = 1000;
  const auto exact = enumerate_lerrw(cfg, horizon);
  // Walks within one environment are correlated, so the SE comes from the
  // spread of per-environment frequencies.
  std::map<std::uint32_t, Mean> freq;
  for (std::uint64_t e = 0; e < envs; ++e) {
    auto env = Environment::sampled(cfg, derive_seed(99, e));
    env.extend_to(horizon);
    std::map<std::uint32_t, std::uint64_t> counts;
    for (std::uint64_t w = 0; w < walks; ++w) {
      Rng rng(derive_seed(derive_seed(100, e), w));
      Vertex pos = 0;
      std::uint32_t moves = 0;
      for (unsigned k = 0; k < horizon; ++k) {
        const int d = quenched_step(env, pos, rng);
        if (d > 0) moves |= 1u << k;
        pos += d;
      }
      ++counts[moves];
    }
    for (const auto& entry : exact.entries)
      freq[entry.moves].add(double(counts[entry.moves]) / walks);
  }
  for (const auto& e : exact.entries) {
    const auto& m = freq[e.moves];
    CAPTURE(path_string(decode_path(e.moves, horizon)));
    CHECK(std::fabs(m.mean() - e.probability.value) <= 4 * m.se());
  }
}

TEST_CASE("mean hitting times of the reflected simple walk") {
  auto unit = Environment::unit();
  unit.extend_to(3);
  for (Vertex x : {Vertex{2}, Vertex{3}}) {
    Mean m;
    for (std::uint64_t r = 0; r < 100'000; ++r) {
      const auto hit = quenched_hit(unit, derive_seed(3, r), x);
      REQUIRE(hit.tau);
      m.add(double(*hit.tau));
    }
    CAPTURE(x);
    CHECK(std::fabs(m.mean() - double(x * x)) < 3 * m.se());
  }
}

TEST_CASE("hit budget overrun is signalled") {
  auto env = Environment::from_probabilities({}, 0.05);
  env.extend_to(60);
  const auto r = quenched_hit(env, 1, 60, 1000);
  CHECK(r.budget_exceeded());
  CHECK(r.steps == 1000);

  auto unit = Environment::unit();
  unit.extend_to(5);
  const auto times = quenched_hit_times(unit, 8, {1, 3, 5});
  REQUIRE(times.size() == 3);
  CHECK(*times[0] == 1);
  CHECK(*times[1] == *quenched_hit(unit, 8, 3).tau);
  CHECK(*times[2] == *quenched_hit(unit, 8, 5).tau);
  CHECK(*times[1] < *times[2]);
}

TEST_CASE("property: conservation and parity") {
  prop::for_all("conservation", 200, 41, [](Rng& rng, std::ostream& why) {
    const WalkConfig cfg{-2.0 + 3.0 * rng.uniform(), 3.0 * rng.uniform()};
    const std::uint64_t n = 1 + rng() % 5000;
    const std::uint64_t seed = rng();
    const auto t = lerrw_run(cfg, seed, n, {}, {true, true});
    const auto& occ = *t.occupation;
    const std::uint64_t total = std::accumulate(occ.begin(), occ.end(), 0ull);
    // Position = ups - downs; each edge's count splits into up and down
    // crossings that differ by one below the position and agree above.
    std::int64_t net = 0;
    for (Vertex x = 0; x < occ.size(); ++x) {
      const bool below = x < t.checkpoints.back().position;
      if ((occ[x] % 2 == 1) != below) {
        why << "edge " << x << " count " << occ[x];
        return false;
      }
      net += below ? 1 : 0;
    }
    why << "alpha=" << cfg.alpha << " n=" << n << " sum phi=" << total;
    return total == n && std::uint64_t(net) == t.checkpoints.back().position;
  });

  prop::for_all("pre-return parity", 500, 42, [](Rng& rng, std::ostream& why) {
    const WalkConfig cfg{-1.0 + 2.0 * rng.uniform(), 2.0 * rng.uniform()};
    WalkState s;
    for (int k = 0; k < 200 && !s.first_return; ++k) {
      lerrw_step(cfg, s, rng);
      if (s.first_return) break;
      for (Vertex x = 0; x < s.position; ++x)
        if (s.count(x) % 2 != 1) {
          why << "step " << k << " edge " << x;
          return false;
        }
    }
    return true;
  });
}

TEST_CASE("returns and outputs") {
  const auto t = lerrw_run({0.0, 1.0}, 12, 2000, geometric_checkpoints(2000),
                           {true, false});
  for (std::size_t i = 1; i < t.return_times.size(); ++i)
    CHECK(t.return_times[i] > t.return_times[i - 1]);
  for (auto n : t.return_times) CHECK(n % 2 == 0);

  std::ostringstream os;
  write_trajectory_csv(os, t);
  CHECK(os.str().rfind("seed,n,position,max_position\n", 0) == 0);
  CHECK(trajectory_summary_json(t).find("returns_to_origin") != std::string::npos);

  // Same seed, same trajectory.
  const auto u = lerrw_run({0.0, 1.0}, 12, 2000, geometric_checkpoints(2000),
                           {true, false});
  CHECK(u.checkpoints == t.checkpoints);
  CHECK(u.return_times == t.return_times);
}

TEST_CASE("quenched run grows the environment") {
  auto env = Environment::sampled({0.5, 1.0}, 4);
  const auto t = quenched_run(env, 2, 10000, {100, 10000}, {false, true});
  CHECK(env.horizon() >= t.checkpoints.back().max_position);
  const auto& occ = *t.occupation;
  CHECK(std::accumulate(occ.begin(), occ.end(), 0ull) == 10000);
}
