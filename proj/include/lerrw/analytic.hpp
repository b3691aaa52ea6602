#pragma once

// Closed-form constants and moments of the log-resistance S_x.
//
// With the environment sites p_i ~ Beta(a_i, b_i),
//   a_i = f(0,i) / (2 delta),  b_i = (f(0,i-1) + delta) / (2 delta),
// each zeta_i = ln((1-p_i)/p_i) has mean digamma(b_i) - digamma(a_i) and
// variance trigamma(a_i) + trigamma(b_i); S_x = zeta_1 + ... + zeta_x.

#include "lerrw/scheme.hpp"

#include <optional>
#include <string>

namespace lerrw {

/// K(alpha, delta), the constant in the (K ln n)^{1/(1-alpha)} growth law.
/// Piecewise in alpha (<0, =0, in (0,1)); the branches are not continuous
/// at alpha = 0. Throws std::domain_error unless alpha < 1 and delta > 0.
[[nodiscard]] double k_constant(double alpha, double delta);

struct MomentPair {
  double mean = 0.0;
  double variance = 0.0;
};

/// E[S_x] as the direct per-site sum. Requires delta > 0 and x >= 1.
[[nodiscard]] double mean_S(const WalkConfig& cfg, Vertex x);
/// E[S_x] in telescoped form: boundary digamma terms plus
/// sum_{i<x} [digamma(c_i + 1/2) - digamma(c_i)], c_i = f(0,i)/(2 delta).
[[nodiscard]] double mean_S_telescoped(const WalkConfig& cfg, Vertex x);
/// V[S_x]. Requires delta > 0 and x >= 1.
[[nodiscard]] double var_S(const WalkConfig& cfg, Vertex x);
[[nodiscard]] MomentPair moments_S(const WalkConfig& cfg, Vertex x);

/// Leading-order E[S_x]: 2D x^{1-a}/(1-a) for a<0, x/K(0,D) for a=0,
/// D x^{1-a}/(1-a) for 0<a<1, (D-1) ln x for a=1 (ln 4 exactly when D=1).
[[nodiscard]] double mean_S_asymptotic(const WalkConfig& cfg, double x);
/// Leading-order V[S_x]: 4D^2 x^{1-2a}/(1-2a), exact i.i.d. rate at a=0,
/// 4D x^{1-a}/(1-a), 4D ln x.
[[nodiscard]] double var_S_asymptotic(const WalkConfig& cfg, double x);

struct ScalingLaw {
  enum class Kind { LogPower, Power };

  Kind kind = Kind::Power;
  /// LogPower: applied to K ln n. Power: exponent of n.
  double exponent = 0.5;
  /// K(alpha, delta) for LogPower.
  std::optional<double> constant;

  /// Predicted growth scale of max_{m<=n} X_m; requires n >= 2.
  [[nodiscard]] double normalizer(double n) const;
  [[nodiscard]] std::string describe() const;
};

/// Growth law of the running maximum in the recurrent regime (alpha <= 1).
/// Throws std::domain_error for alpha > 1.
[[nodiscard]] ScalingLaw predict_scaling(const WalkConfig& cfg);

/// Whether Z = sum_x pi_x is finite almost surely for the random environment:
/// (alpha < 1, delta > 0) or (alpha = 1, delta > 2).
[[nodiscard]] bool normalizer_summable(const WalkConfig& cfg) noexcept;

}  // namespace lerrw
