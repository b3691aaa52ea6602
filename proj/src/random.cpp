#include "lerrw/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lerrw {

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    word = splitmix64(x);
    x += 0x9E3779B97F4A7C15ULL;
  }
}

double Rng::normal() noexcept {
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double log_gamma_variate(double shape, Rng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw std::domain_error("log_gamma_variate: shape must be positive");
  if (shape < 1.0) {
    const double boosted = log_gamma_variate(shape + 1.0, rng);
    return boosted + std::log(rng.uniform_open()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return std::log(d * v);
  }
}

BetaDraw sample_beta(double a, double b, Rng& rng) {
  const double lga = log_gamma_variate(a, rng);
  const double lgb = log_gamma_variate(b, rng);
  BetaDraw out;
  out.log_odds = lgb - lga;
  // p = 1 / (1 + e^zeta), written to stay accurate at both tails. The
  // clamp keeps p strictly inside (0,1) once |zeta| exceeds double range;
  // log_odds stays exact.
  const double p = out.log_odds > 0.0
                       ? std::exp(-out.log_odds) / (1.0 + std::exp(-out.log_odds))
                       : 1.0 / (1.0 + std::exp(out.log_odds));
  out.p = std::clamp(p, std::numeric_limits<double>::denorm_min(),
                     std::nextafter(1.0, 0.0));
  return out;
}

}  // namespace lerrw
