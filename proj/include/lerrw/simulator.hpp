#pragma once

// Reinforced walk on the half-line and the quenched walk in a fixed
// environment.

#include "lerrw/environment.hpp"
#include "lerrw/random.hpp"
#include "lerrw/scheme.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lerrw {

struct WalkState {
  Vertex position = 0;
  /// phi[x] = traversals of edge {x, x+1} so far. Grows on demand.
  std::vector<std::uint64_t> phi;
  std::uint64_t n = 0;
  Vertex max_position = 0;
  /// First n > 0 with position 0, if any.
  std::optional<std::uint64_t> first_return;

  [[nodiscard]] std::uint64_t count(Vertex x) const noexcept {
    return x < phi.size() ? phi[x] : 0;
  }
  /// Moves the walker by +1 or -1 and updates counts.
  void apply(int direction);
};

/// w_n(position) / (w_n(position-1) + w_n(position)); 1 at the origin.
[[nodiscard]] double up_probability(const WalkConfig& cfg,
                                    const WalkState& state);

/// One reinforced step. Returns the move taken (+1 or -1).
int lerrw_step(const WalkConfig& cfg, WalkState& state, Rng& rng);

/// Step loop with the initial weights cached per site. Produces the same
/// moves as repeated lerrw_step for the same rng stream.
class LerrwWalker {
 public:
  explicit LerrwWalker(const WalkConfig& cfg);

  [[nodiscard]] const WalkState& state() const noexcept { return state_; }
  [[nodiscard]] const WalkConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] double weight(Vertex x) const noexcept {
    return f0_[x] + static_cast<double>(state_.phi[x]) * cfg_.delta;
  }

  int step(Rng& rng);
  /// Runs until state().n == n_target.
  void advance_to(std::uint64_t n_target, Rng& rng,
                  std::vector<std::uint64_t>* return_times = nullptr);

 private:
  void grow();

  WalkConfig cfg_;
  WalkState state_;
  std::vector<double> f0_;
};

/// Sorted distinct values ceil(c * 1.5^k) <= n_max, ending with n_max.
[[nodiscard]] std::vector<std::uint64_t> geometric_checkpoints(
    std::uint64_t n_max, double c = 16.0);

struct Checkpoint {
  std::uint64_t n = 0;
  Vertex position = 0;
  Vertex max_position = 0;

  bool operator==(const Checkpoint&) const = default;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;
  std::vector<std::uint64_t> return_times;
  std::optional<std::vector<std::uint64_t>> occupation;
};

struct RunOptions {
  bool record_returns = false;
  bool record_occupation = false;
};

/// Reinforced walk of n_steps driven by Rng(seed). Checkpoints beyond
/// n_steps are dropped; an empty schedule records only n_steps.
[[nodiscard]] Trajectory lerrw_run(const WalkConfig& cfg, std::uint64_t seed,
                                   std::uint64_t n_steps,
                                   const std::vector<std::uint64_t>& schedule,
                                   const RunOptions& opts = {});

/// Up with probability p_position. Requires position <= env.horizon().
int quenched_step(const Environment& env, Vertex position, Rng& rng);

/// Quenched walk of n_steps, extending env as the walker climbs.
[[nodiscard]] Trajectory quenched_run(Environment& env, std::uint64_t seed,
                                      std::uint64_t n_steps,
                                      const std::vector<std::uint64_t>& schedule,
                                      const RunOptions& opts = {});

inline constexpr std::uint64_t kDefaultHitBudget = 10'000'000'000ULL;

struct HitResult {
  /// First n with Y_n = x; empty when the budget ran out.
  std::optional<std::uint64_t> tau;
  std::uint64_t steps = 0;

  [[nodiscard]] bool budget_exceeded() const noexcept { return !tau; }
};

/// Runs the quenched walk from 0 until it reaches x. env must be
/// materialized up to x - 1.
[[nodiscard]] HitResult quenched_hit(const Environment& env, std::uint64_t seed,
                                     Vertex x,
                                     std::uint64_t budget = kDefaultHitBudget);

/// First hitting times of each target (sorted ascending, all >= 1) along
/// one quenched walk from 0; empty entries were not reached within budget.
/// env must be materialized up to targets.back() - 1.
[[nodiscard]] std::vector<std::optional<std::uint64_t>> quenched_hit_times(
    const Environment& env, std::uint64_t seed,
    const std::vector<Vertex>& targets, std::uint64_t budget = kDefaultHitBudget);

/// Rows seed,n,position,max_position, preceded by the header if asked.
void write_trajectory_csv(std::ostream& os, const Trajectory& t,
                          bool header = true);
/// Compact JSON summary: final state, checkpoint count, return count.
[[nodiscard]] std::string trajectory_summary_json(const Trajectory& t);

}  // namespace lerrw
