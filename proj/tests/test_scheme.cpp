#include "lerrw/scheme.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace lerrw;

TEST_CASE("initial weight") {
  CHECK(initial_weight({0.5, 1.0}, 4) == 2.0);
  CHECK(initial_weight({-3.0, 1.0}, 0) == 1.0);
  CHECK(initial_weight({-1.0, 1.0}, 2) == 0.5);
  CHECK(initial_weight({7.0, 0.0}, 0) == 1.0);
  CHECK(initial_weight({2.0, 1.0}, 3) == 9.0);
}

TEST_CASE("scheme weight") {
  CHECK(scheme_weight({0.0, 1.0}, 3, 5) == 4.0);
  CHECK(scheme_weight({1.0, 0.5}, 3, 2) == 3.5);
  for (Vertex x : {0u, 1u, 7u, 1000u})
    CHECK(scheme_weight({-0.7, 2.5}, 0, x) == initial_weight({-0.7, 2.5}, x));
  CHECK(scheme_weight({1.0, 0.0}, 1000, 3) == 3.0);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW((WalkConfig{0.0, 0.0}.validate()));
  CHECK_THROWS_AS((WalkConfig{0.0, -1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(
      (WalkConfig{std::numeric_limits<double>::quiet_NaN(), 1.0}.validate()),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (WalkConfig{std::numeric_limits<double>::infinity(), 1.0}.validate()),
      std::invalid_argument);
  CHECK(WalkConfig{2.0, 1.0}.integer_alpha());
  CHECK_FALSE(WalkConfig{0.5, 1.0}.integer_alpha());
}

TEST_CASE("classification") {
  CHECK(classify({1.5, 1.0}).verdict == Recurrence::Transient);
  CHECK(classify({1.0, 1.0}).verdict == Recurrence::Recurrent);
  CHECK(classify({-2.0, 0.0}).verdict == Recurrence::Recurrent);
  CHECK(to_string(Recurrence::Transient) == "transient");

  // Partial sums: unbounded growth for alpha <= 1, Cauchy for alpha > 1.
  const auto harmonic = classify({1.0, 1.0}, 1'000'000);
  CHECK(harmonic.cutoff == 1'000'000);
  CHECK(harmonic.partial_f0_sum > std::log(1e6));
  const auto flat = classify({0.0, 1.0}, 1000);
  CHECK(flat.partial_f0_sum == doctest::Approx(1001.0));

  // sum_{x>=1} x^-2 = pi^2/6; tail beyond N is below 1/N.
  const auto t = classify({2.0, 1.0}, 1'000'000);
  const double full = 1.0 + M_PI * M_PI / 6.0;
  CHECK(full - t.partial_f0_sum > 0.0);
  CHECK(full - t.partial_f0_sum < 1e-6);
}

TEST_CASE("property: weights positive and non-decreasing in ell") {
  prop::for_all("monotone", 2000, 11, [](Rng& rng, std::ostream& why) {
    const WalkConfig cfg{-5.0 + 7.0 * rng.uniform(), 4.0 * rng.uniform()};
    const Vertex x = rng() % 100000;
    const std::uint64_t ell = rng() % 1000;
    const double w0 = scheme_weight(cfg, ell, x);
    const double w1 = scheme_weight(cfg, ell + 1, x);
    why << "alpha=" << cfg.alpha << " delta=" << cfg.delta << " x=" << x
        << " ell=" << ell << " w=" << w0 << "," << w1;
    return w0 > 0.0 && w1 >= w0;
  });
}
