#pragma once

// Beta random environment on the half-line and its electrical quantities.
//
// Site i >= 1 moves up with probability p_i ~ Beta(a_i, b_i), independent
// across sites; p_0 = 1 reflects at the origin. Derived per-prefix data:
//
//   S_x   = sum_{i=1..x} ln((1-p_i)/p_i)      log-resistance, S_0 = 0
//   g_x   = exp(S_x)                          resistance of edge {x,x+1}
//   h(x)  = sum_{i<x} g_i                     harmonic, h(0)=0, h(1)=1
//   pi_x  = 1/g_{x-1} + 1/g_x                 reversible measure (pi_0 = 1)
//   T(x)  = sum_{i<x} g_i sum_{j<=i} pi_j     mean hitting time of x from 0
//
// g_x leaves double range quickly (S_x grows like x^{1-alpha}), so every
// quantity is stored as a logarithm and exponentiated only on request.
//
// Sites are materialized lazily. Non-const queries extend the horizon as
// needed and must stay with one owner; after extend_to(h), a const reference
// can be shared and its const queries at x <= h are lock-free. Const queries
// beyond the horizon throw std::out_of_range.

#include "lerrw/random.hpp"
#include "lerrw/scheme.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lerrw {

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

/// (f(0,i) / (2 delta), (f(0,i-1) + delta) / (2 delta)).
/// Throws std::domain_error unless delta > 0 and i >= 1.
[[nodiscard]] BetaParams beta_params(const WalkConfig& cfg, Vertex i);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Streams S_1, S_2, ... of a sampled environment without storing it.
/// Produces exactly the values Environment::sampled(cfg, seed) holds.
class LogResistanceStream {
 public:
  LogResistanceStream(const WalkConfig& cfg, std::uint64_t master_seed);

  /// Samples the next site and returns its S.
  double next();
  /// Advances to site x (>= site()) and returns S_x.
  double advance_to(Vertex x);

  [[nodiscard]] Vertex site() const noexcept { return site_; }
  [[nodiscard]] double value() const noexcept { return sum_.value(); }
  /// p and zeta of the most recently sampled site.
  [[nodiscard]] const BetaDraw& last_draw() const noexcept { return draw_; }

 private:
  WalkConfig cfg_;
  std::uint64_t seed_;
  Vertex site_ = 0;
  CompensatedSum sum_;
  BetaDraw draw_{1.0, 0.0};
};

/// Convergence of Z = sum pi_x. Sampled environments take it from the
/// analytic condition on (alpha, delta); fixed environments carry no verdict.
enum class SummabilityVerdict { Summable, Diverges, Undetermined };

[[nodiscard]] std::string_view to_string(SummabilityVerdict v) noexcept;

struct NormalizerResult {
  Vertex cutoff = 0;
  double log_partial = 0.0;  ///< ln sum_{i<=cutoff} pi_i
  SummabilityVerdict verdict = SummabilityVerdict::Undetermined;

  [[nodiscard]] double partial() const;
};

struct HittingBounds {
  double log_lower = 0.0;  ///< ln max(h(x), max_{i<x} g_i)
  double log_upper = 0.0;  ///< ln(2 x^2 max_{i<x} g_i max_{j<x} 1/g_j)
  /// ln(Z_partial h(x)); set only when Z is known to be finite.
  std::optional<double> log_upper_posrec;

  [[nodiscard]] double lower() const;
  [[nodiscard]] double upper() const;
  [[nodiscard]] std::optional<double> upper_posrec() const;
};

class Environment {
 public:
  /// Beta environment for cfg (delta > 0). p_i depends only on
  /// (master_seed, i).
  static Environment sampled(const WalkConfig& cfg, std::uint64_t master_seed);
  /// Fixed environment with p_1.. given explicitly and `tail_p` beyond.
  static Environment from_probabilities(std::vector<double> p_from_site_1,
                                        double tail_p = 0.5);
  /// Simple reflected walk: every p_i = 1/2, so g_x = 1.
  static Environment unit() { return from_probabilities({}, 0.5); }

  [[nodiscard]] const std::optional<WalkConfig>& config() const noexcept {
    return cfg_;
  }
  [[nodiscard]] std::uint64_t master_seed() const noexcept { return seed_; }
  /// Largest materialized site index.
  [[nodiscard]] Vertex horizon() const noexcept { return S_.size() - 1; }
  void extend_to(Vertex x);

  [[nodiscard]] double p(Vertex i);
  [[nodiscard]] double p(Vertex i) const;
  /// zeta_i = ln((1-p_i)/p_i); zero at i = 0.
  [[nodiscard]] double log_odds(Vertex i);
  [[nodiscard]] double log_odds(Vertex i) const;

  [[nodiscard]] double log_resistance(Vertex x);
  [[nodiscard]] double log_resistance(Vertex x) const;
  [[nodiscard]] double resistance(Vertex x);
  [[nodiscard]] double resistance(Vertex x) const;

  [[nodiscard]] double log_harmonic(Vertex x);
  [[nodiscard]] double log_harmonic(Vertex x) const;
  [[nodiscard]] double harmonic(Vertex x);
  [[nodiscard]] double harmonic(Vertex x) const;

  [[nodiscard]] double log_reversible_mass(Vertex x);
  [[nodiscard]] double log_reversible_mass(Vertex x) const;
  [[nodiscard]] double reversible_mass(Vertex x);
  [[nodiscard]] double reversible_mass(Vertex x) const;

  [[nodiscard]] NormalizerResult normalizer(Vertex cutoff);
  [[nodiscard]] NormalizerResult normalizer(Vertex cutoff) const;

  [[nodiscard]] double log_expected_hitting_time(Vertex x);
  [[nodiscard]] double log_expected_hitting_time(Vertex x) const;
  [[nodiscard]] double expected_hitting_time(Vertex x);
  [[nodiscard]] double expected_hitting_time(Vertex x) const;

  /// Requires x >= 1. The positive-recurrent bound uses the partial sum of
  /// Z up to max(z_cutoff, x - 1), which already dominates T(x)/h(x).
  [[nodiscard]] HittingBounds hitting_bounds(Vertex x, Vertex z_cutoff);
  [[nodiscard]] HittingBounds hitting_bounds(Vertex x, Vertex z_cutoff) const;

  [[nodiscard]] SummabilityVerdict summability() const noexcept;

  /// p_0 .. p_horizon, contiguous, for tight walker loops.
  [[nodiscard]] std::span<const double> probabilities() const noexcept {
    return p_;
  }

  /// CSV rows i,p_i,S_i,h_i,T_i for i in [0, upto].
  void write_csv(std::ostream& os, Vertex upto);

 private:
  Environment() = default;
  void push_site();
  void require(Vertex x, const char* what) const;

  std::optional<WalkConfig> cfg_;
  std::uint64_t seed_ = 0;
  std::vector<double> fixed_p_;
  double tail_p_ = 0.5;

  std::vector<double> p_;
  std::vector<double> zeta_;
  std::optional<LogResistanceStream> stream_;
  CompensatedSum fixed_sum_;
  std::vector<double> S_;
  std::vector<double> log_h_;
  std::vector<double> log_pi_;
  std::vector<double> log_pi_cum_;
  std::vector<double> log_T_;
  std::vector<double> max_S_;  // max_{i<x} S_i
  std::vector<double> min_S_;  // min_{i<x} S_i
};

}  // namespace lerrw
