#include "lerrw/analytic.hpp"

#include "lerrw/simd/kernels.hpp"
#include "lerrw/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lerrw {
namespace {

constexpr std::size_t kChunk = 4096;

void require_reinforced(const WalkConfig& cfg, const char* what) {
  cfg.validate();
  if (!(cfg.delta > 0.0))
    throw std::domain_error(std::string(what) + ": requires delta > 0");
}

void require_site(Vertex x, const char* what) {
  if (x < 1) throw std::domain_error(std::string(what) + ": requires x >= 1");
}

// Streams (a_i, b_i) for i in [1, x] through `sink` in fixed-size chunks.
template <class Sink>
void for_each_beta_chunk(const WalkConfig& cfg, Vertex x, Sink&& sink) {
  std::array<double, kChunk> a{};
  std::array<double, kChunk> b{};
  const double inv2d = 1.0 / (2.0 * cfg.delta);
  double prev = initial_weight(cfg, 0);
  Vertex i = 1;
  while (i <= x) {
    const std::size_t len =
        static_cast<std::size_t>(std::min<Vertex>(kChunk, x - i + 1));
    for (std::size_t k = 0; k < len; ++k, ++i) {
      const double cur = initial_weight(cfg, i);
      a[k] = cur * inv2d;
      b[k] = (prev + cfg.delta) * inv2d;
      prev = cur;
    }
    sink(std::span<const double>(a.data(), len),
         std::span<const double>(b.data(), len));
  }
}

}  // namespace

double k_constant(double alpha, double delta) {
  if (!(alpha < 1.0) || !(delta > 0.0) || !std::isfinite(delta))
    throw std::domain_error("k_constant: requires alpha < 1 and delta > 0");
  if (alpha < 0.0) return (1.0 - alpha) / (2.0 * delta);
  if (alpha == 0.0) {
    const double z = 1.0 / (2.0 * delta);
    return 1.0 / (digamma(z + 0.5) - digamma(z));
  }
  return (1.0 - alpha) / delta;
}

double mean_S(const WalkConfig& cfg, Vertex x) {
  require_reinforced(cfg, "mean_S");
  require_site(x, "mean_S");
  double total = 0.0;
  for_each_beta_chunk(cfg, x, [&](auto a, auto b) {
    total += simd::sum_digamma_difference(b, a);
  });
  return total;
}

double mean_S_telescoped(const WalkConfig& cfg, Vertex x) {
  require_reinforced(cfg, "mean_S_telescoped");
  require_site(x, "mean_S_telescoped");
  const double inv2d = 1.0 / (2.0 * cfg.delta);
  const double boundary = digamma(initial_weight(cfg, 0) * inv2d) -
                          digamma(initial_weight(cfg, x) * inv2d);
  std::array<double, kChunk> c{};
  std::array<double, kChunk> c_half{};
  double body = 0.0;
  Vertex i = 0;
  while (i < x) {
    const std::size_t len =
        static_cast<std::size_t>(std::min<Vertex>(kChunk, x - i));
    for (std::size_t k = 0; k < len; ++k, ++i) {
      c[k] = initial_weight(cfg, i) * inv2d;
      c_half[k] = c[k] + 0.5;
    }
    body += simd::sum_digamma_difference({c_half.data(), len}, {c.data(), len});
  }
  return boundary + body;
}

double var_S(const WalkConfig& cfg, Vertex x) {
  require_reinforced(cfg, "var_S");
  require_site(x, "var_S");
  double total = 0.0;
  for_each_beta_chunk(cfg, x, [&](auto a, auto b) {
    total += simd::sum_trigamma_pair(a, b);
  });
  return total;
}

MomentPair moments_S(const WalkConfig& cfg, Vertex x) {
  return {mean_S(cfg, x), var_S(cfg, x)};
}

double mean_S_asymptotic(const WalkConfig& cfg, double x) {
  require_reinforced(cfg, "mean_S_asymptotic");
  if (!(x >= 1.0)) throw std::domain_error("mean_S_asymptotic: requires x >= 1");
  const double a = cfg.alpha;
  const double d = cfg.delta;
  if (a > 1.0)
    throw std::domain_error("mean_S_asymptotic: requires alpha <= 1");
  if (a < 0.0) return 2.0 * d * std::pow(x, 1.0 - a) / (1.0 - a);
  if (a == 0.0) return x / k_constant(0.0, d);
  if (a < 1.0) return d * std::pow(x, 1.0 - a) / (1.0 - a);
  if (d == 1.0) return 2.0 * std::numbers::ln2;
  return (d - 1.0) * std::log(x);
}

double var_S_asymptotic(const WalkConfig& cfg, double x) {
  require_reinforced(cfg, "var_S_asymptotic");
  if (!(x >= 1.0)) throw std::domain_error("var_S_asymptotic: requires x >= 1");
  const double a = cfg.alpha;
  const double d = cfg.delta;
  if (a > 1.0) throw std::domain_error("var_S_asymptotic: requires alpha <= 1");
  if (a < 0.0)
    return 4.0 * d * d * std::pow(x, 1.0 - 2.0 * a) / (1.0 - 2.0 * a);
  if (a == 0.0) {
    const double z = 1.0 / (2.0 * d);
    return x * (trigamma(z) + trigamma(z + 0.5));
  }
  if (a < 1.0) return 4.0 * d * std::pow(x, 1.0 - a) / (1.0 - a);
  return 4.0 * d * std::log(x);
}

double ScalingLaw::normalizer(double n) const {
  if (!(n >= 2.0)) throw std::domain_error("normalizer: requires n >= 2");
  if (kind == Kind::LogPower)
    return std::pow(constant.value() * std::log(n), exponent);
  return std::pow(n, exponent);
}

std::string ScalingLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::LogPower)
    os << "(K ln n)^" << exponent << " with K=" << constant.value();
  else
    os << "n^" << exponent;
  return os.str();
}

ScalingLaw predict_scaling(const WalkConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha;
  const double d = cfg.delta;
  if (a > 1.0)
    throw std::domain_error(
        "predict_scaling: alpha > 1 is transient, no growth law");
  using Kind = ScalingLaw::Kind;
  if (d == 0.0) {
    if (a < -1.0) return {Kind::Power, 1.0 / (1.0 - a), std::nullopt};
    return {Kind::Power, 0.5, std::nullopt};
  }
  if (a < 1.0) return {Kind::LogPower, 1.0 / (1.0 - a), k_constant(a, d)};
  if (d > 2.0) return {Kind::Power, 1.0 / d, std::nullopt};
  return {Kind::Power, 0.5, std::nullopt};
}

bool normalizer_summable(const WalkConfig& cfg) noexcept {
  return (cfg.alpha < 1.0 && cfg.delta > 0.0) ||
         (cfg.alpha == 1.0 && cfg.delta > 2.0);
}

}  // namespace lerrw
