#pragma once

// Linear reinforcement scheme on the half-line.
//
// Edge {x, x+1} starts with weight f(0,x) = x^alpha v 1 (exactly 1 at x = 0)
// and gains delta each time it is traversed: f(l,x) = f(0,x) + l * delta.

#include <cstdint>
#include <string_view>

namespace lerrw {

using Vertex = std::uint64_t;

struct WalkConfig {
  double alpha = 0.0;
  double delta = 1.0;

  /// Throws std::invalid_argument unless alpha is finite and delta >= 0.
  void validate() const;

  [[nodiscard]] bool reinforced() const noexcept { return delta > 0.0; }
  [[nodiscard]] bool integer_alpha() const noexcept;
};

/// f(0,x). Exact for integer alpha whenever the power is representable.
[[nodiscard]] double initial_weight(const WalkConfig& cfg, Vertex x) noexcept;

/// f(ell,x) = f(0,x) + ell * delta.
[[nodiscard]] double scheme_weight(const WalkConfig& cfg, std::uint64_t ell,
                                   Vertex x) noexcept;

enum class Recurrence { Recurrent, Transient };

[[nodiscard]] std::string_view to_string(Recurrence r) noexcept;

struct Classification {
  Recurrence verdict = Recurrence::Recurrent;
  /// sum_{x <= cutoff} 1 / f(0,x); diagnostic only.
  double partial_f0_sum = 0.0;
  Vertex cutoff = 0;
};

/// The walk is recurrent iff F0 = sum_x 1/f(0,x) diverges, which for the
/// power-law family happens iff alpha <= 1. The verdict is taken from alpha;
/// the partial sum up to `cutoff` is reported alongside.
[[nodiscard]] Classification classify(const WalkConfig& cfg,
                                      Vertex cutoff = 1'000'000);

}  // namespace lerrw
