#pragma once

// Log-gamma, digamma, trigamma and log-beta on the positive reals.
//
// All three gamma-family functions use the same scheme: push the argument
// up to kAsymptoticThreshold with the functional recurrence, then evaluate
// the Bernoulli asymptotic series. Nonpositive or NaN arguments throw
// std::domain_error.

namespace lerrw {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Below this the recurrence is applied before the asymptotic series.
inline constexpr double kAsymptoticThreshold = 10.0;

struct SpecialFunctionResult {
  double value = 0.0;
  double estimated_abs_error = 0.0;
};

[[nodiscard]] double digamma(double z);
[[nodiscard]] double trigamma(double z);
[[nodiscard]] double log_gamma(double z);
[[nodiscard]] double log_beta(double a, double b);

// Same values with a rounding/truncation error estimate attached.
[[nodiscard]] SpecialFunctionResult digamma_e(double z);
[[nodiscard]] SpecialFunctionResult trigamma_e(double z);
[[nodiscard]] SpecialFunctionResult log_gamma_e(double z);

namespace detail {

// Tail of the asymptotic series at w >= kAsymptoticThreshold; exposed so the
// SIMD kernels share coefficients with the scalar path.
inline constexpr double kDigammaSeries[] = {
    1.0 / 12.0,  -1.0 / 120.0,      1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
};
inline constexpr double kTrigammaSeries[] = {
    1.0 / 6.0,  -1.0 / 30.0,       1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
};
inline constexpr double kLogGammaSeries[] = {
    1.0 / 12.0,   -1.0 / 360.0,        1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0,
};

}  // namespace detail
}  // namespace lerrw
