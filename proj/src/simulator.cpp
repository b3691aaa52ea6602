#include "lerrw/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace lerrw {

void WalkState::apply(int direction) {
  if (direction > 0) {
    if (position >= phi.size()) phi.resize(std::max<std::size_t>(2 * phi.size(), position + 1), 0);
    ++phi[position];
    ++position;
    max_position = std::max(max_position, position);
  } else {
    if (position == 0)
      throw std::logic_error("WalkState::apply: cannot step below 0");
    --position;
    ++phi[position];
    if (position == 0 && !first_return) first_return = n + 1;
  }
  ++n;
}

double up_probability(const WalkConfig& cfg, const WalkState& state) {
  const Vertex x = state.position;
  if (x == 0) return 1.0;
  const double right = scheme_weight(cfg, state.count(x), x);
  const double left = scheme_weight(cfg, state.count(x - 1), x - 1);
  return right / (left + right);
}

int lerrw_step(const WalkConfig& cfg, WalkState& state, Rng& rng) {
  const Vertex x = state.position;
  int dir = 1;
  if (x > 0) {
    const double right = scheme_weight(cfg, state.count(x), x);
    const double left = scheme_weight(cfg, state.count(x - 1), x - 1);
    dir = rng.uniform() * (left + right) < right ? 1 : -1;
  }
  state.apply(dir);
  return dir;
}

LerrwWalker::LerrwWalker(const WalkConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  grow();
}

void LerrwWalker::grow() {
  const std::size_t old = f0_.size();
  const std::size_t size = std::max<std::size_t>(64, 2 * old);
  f0_.resize(size);
  for (std::size_t x = old; x < size; ++x) f0_[x] = initial_weight(cfg_, x);
  state_.phi.resize(size, 0);
}

int LerrwWalker::step(Rng& rng) {
  WalkState& s = state_;
  const Vertex x = s.position;
  if (x == 0) {
    ++s.phi[0];
    s.position = 1;
    s.max_position = std::max<Vertex>(s.max_position, 1);
    ++s.n;
    return 1;
  }
  const double right = weight(x);
  const double left = weight(x - 1);
  if (rng.uniform() * (left + right) < right) {
    ++s.phi[x];
    s.position = x + 1;
    if (s.position > s.max_position) {
      s.max_position = s.position;
      if (s.position >= f0_.size()) grow();
    }
    ++s.n;
    return 1;
  }
  ++s.phi[x - 1];
  s.position = x - 1;
  ++s.n;
  if (s.position == 0 && !s.first_return) s.first_return = s.n;
  return -1;
}

void LerrwWalker::advance_to(std::uint64_t n_target, Rng& rng,
                             std::vector<std::uint64_t>* return_times) {
  while (state_.n < n_target) {
    if (step(rng) < 0 && return_times && state_.position == 0)
      return_times->push_back(state_.n);
  }
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max,
                                                 double c) {
  if (!(c > 0.0)) throw std::invalid_argument("checkpoint base must be > 0");
  std::vector<std::uint64_t> out;
  for (double v = c; v < static_cast<double>(n_max); v *= 1.5) {
    const auto n = static_cast<std::uint64_t>(std::ceil(v));
    if (n >= n_max) break;
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  if (n_max > 0) out.push_back(n_max);
  return out;
}

namespace {

std::vector<std::uint64_t> effective_schedule(
    const std::vector<std::uint64_t>& schedule, std::uint64_t n_steps) {
  std::vector<std::uint64_t> out;
  for (auto n : schedule)
    if (n >= 1 && n <= n_steps) out.push_back(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) out.push_back(n_steps);
  return out;
}

}  // namespace

Trajectory lerrw_run(const WalkConfig& cfg, std::uint64_t seed,
                     std::uint64_t n_steps,
                     const std::vector<std::uint64_t>& schedule,
                     const RunOptions& opts) {
  if (n_steps < 1) throw std::invalid_argument("lerrw_run: n_steps must be >= 1");
  LerrwWalker walker(cfg);
  Rng rng(seed);
  Trajectory t;
  t.seed = seed;
  auto* returns = opts.record_returns ? &t.return_times : nullptr;
  for (auto n : effective_schedule(schedule, n_steps)) {
    walker.advance_to(n, rng, returns);
    const WalkState& s = walker.state();
    t.checkpoints.push_back({s.n, s.position, s.max_position});
  }
  if (opts.record_occupation) {
    const auto& phi = walker.state().phi;
    t.occupation.emplace(phi.begin(),
                         phi.begin() + walker.state().max_position);
  }
  return t;
}

int quenched_step(const Environment& env, Vertex position, Rng& rng) {
  if (position == 0) return 1;
  return rng.uniform() < env.p(position) ? 1 : -1;
}

Trajectory quenched_run(Environment& env, std::uint64_t seed,
                        std::uint64_t n_steps,
                        const std::vector<std::uint64_t>& schedule,
                        const RunOptions& opts) {
  if (n_steps < 1)
    throw std::invalid_argument("quenched_run: n_steps must be >= 1");
  Rng rng(seed);
  Trajectory t;
  t.seed = seed;
  std::vector<std::uint64_t> phi;
  Vertex pos = 0;
  Vertex max_pos = 0;
  std::uint64_t n = 0;
  env.extend_to(64);
  for (auto target : effective_schedule(schedule, n_steps)) {
    while (n < target) {
      if (pos == env.horizon()) env.extend_to(2 * pos);
      const int dir = pos == 0 || rng.uniform() < env.probabilities()[pos] ? 1 : -1;
      if (opts.record_occupation) {
        const Vertex edge = dir > 0 ? pos : pos - 1;
        if (edge >= phi.size()) phi.resize(edge + 1, 0);
        ++phi[edge];
      }
      pos = dir > 0 ? pos + 1 : pos - 1;
      max_pos = std::max(max_pos, pos);
      ++n;
      if (pos == 0 && opts.record_returns) t.return_times.push_back(n);
    }
    t.checkpoints.push_back({n, pos, max_pos});
  }
  if (opts.record_occupation) {
    phi.resize(max_pos, 0);
    t.occupation = std::move(phi);
  }
  return t;
}

HitResult quenched_hit(const Environment& env, std::uint64_t seed, Vertex x,
                       std::uint64_t budget) {
  HitResult out;
  if (x == 0) {
    out.tau = 0;
    return out;
  }
  if (env.horizon() + 1 < x)
    throw std::out_of_range("quenched_hit: environment not materialized to x-1");
  const auto p = env.probabilities();
  Rng rng(seed);
  Vertex pos = 0;
  std::uint64_t n = 0;
  while (n < budget) {
    pos = pos == 0 || rng.uniform() < p[pos] ? pos + 1 : pos - 1;
    ++n;
    if (pos == x) {
      out.tau = n;
      break;
    }
  }
  out.steps = n;
  return out;
}

std::vector<std::optional<std::uint64_t>> quenched_hit_times(
    const Environment& env, std::uint64_t seed,
    const std::vector<Vertex>& targets, std::uint64_t budget) {
  std::vector<std::optional<std::uint64_t>> out(targets.size());
  if (targets.empty()) return out;
  if (!std::is_sorted(targets.begin(), targets.end()) || targets.front() < 1)
    throw std::invalid_argument("quenched_hit_times: targets must be sorted and >= 1");
  if (env.horizon() + 1 < targets.back())
    throw std::out_of_range(
        "quenched_hit_times: environment not materialized to the last target");
  const auto p = env.probabilities();
  Rng rng(seed);
  Vertex pos = 0;
  std::uint64_t n = 0;
  std::size_t next = 0;
  while (n < budget) {
    pos = pos == 0 || rng.uniform() < p[pos] ? pos + 1 : pos - 1;
    ++n;
    if (pos == targets[next]) {
      while (next < targets.size() && targets[next] == pos) out[next++] = n;
      if (next == targets.size()) break;
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t, bool header) {
  if (header) os << "seed,n,position,max_position\n";
  for (const auto& c : t.checkpoints)
    os << t.seed << ',' << c.n << ',' << c.position << ',' << c.max_position
       << '\n';
}

std::string trajectory_summary_json(const Trajectory& t) {
  nlohmann::json j;
  j["seed"] = t.seed;
  if (!t.checkpoints.empty()) {
    const auto& last = t.checkpoints.back();
    j["steps"] = last.n;
    j["position"] = last.position;
    j["max_position"] = last.max_position;
  }
  j["checkpoints"] = t.checkpoints.size();
  j["returns_to_origin"] = t.return_times.size();
  if (t.occupation) j["occupation"] = *t.occupation;
  return j.dump();
}

}  // namespace lerrw
