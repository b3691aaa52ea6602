#pragma once

// Splittable random streams and small-shape-safe Gamma/Beta sampling.
//
// Every consumer (an environment site, a walk replica) gets its own
// xoshiro256++ stream seeded from a hash of (master seed, stream index), so
// results never depend on evaluation order or thread count.

#include <cstdint>
#include <limits>

namespace lerrw {

/// SplitMix64 finalizer applied to x + golden ratio increment.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` under `master`.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master,
                                                  std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;
  Rng(std::uint64_t master, std::uint64_t stream) noexcept
      : Rng(derive_seed(master, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }
  /// Standard normal (Marsaglia polar method, one output per call).
  double normal() noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// ln G with G ~ Gamma(shape, 1). For shape < 1 uses
/// G_a = G_{a+1} * U^{1/a} evaluated in logs, so tiny shapes give very
/// negative but finite results instead of underflowing to ln 0.
[[nodiscard]] double log_gamma_variate(double shape, Rng& rng);

struct BetaDraw {
  double p = 0.5;
  /// ln((1-p)/p) computed as ln G_b - ln G_a, free of cancellation.
  double log_odds = 0.0;
};

/// p ~ Beta(a, b) via the Gamma ratio G_a / (G_a + G_b).
[[nodiscard]] BetaDraw sample_beta(double a, double b, Rng& rng);

}  // namespace lerrw
