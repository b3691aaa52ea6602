#include "lerrw/simd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lerrw::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(LERRW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("LERRW_SIMD")) {
    if (std::string_view(env) == "scalar") return Isa::Scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void require_domain(std::span<const double> z, const char* what) {
  for (double v : z) {
    if (!(v > 0.0) || std::isinf(v))
      throw std::domain_error(std::string(what) +
                              ": arguments must be positive and finite");
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

Isa detected_isa() noexcept {
  static const Isa isa = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  return isa;
}

bool isa_available(Isa isa) noexcept {
  return isa == Isa::Scalar || detected_isa() == Isa::Avx2;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("ISA not available: " +
                                std::string(to_string(isa)));
  active().store(isa, std::memory_order_relaxed);
}

void digamma_batch(std::span<const double> z, std::span<double> out) {
  require_same_size(z.size(), out.size(), "digamma_batch");
  require_domain(z, "digamma_batch");
#if defined(LERRW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return avx2::digamma_batch(z.data(), z.size(), out.data());
#endif
  scalar::digamma_batch(z.data(), z.size(), out.data());
}

void trigamma_batch(std::span<const double> z, std::span<double> out) {
  require_same_size(z.size(), out.size(), "trigamma_batch");
  require_domain(z, "trigamma_batch");
#if defined(LERRW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return avx2::trigamma_batch(z.data(), z.size(), out.data());
#endif
  scalar::trigamma_batch(z.data(), z.size(), out.data());
}

double sum_digamma_difference(std::span<const double> hi,
                              std::span<const double> lo) {
  require_same_size(hi.size(), lo.size(), "sum_digamma_difference");
  require_domain(hi, "sum_digamma_difference");
  require_domain(lo, "sum_digamma_difference");
#if defined(LERRW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return avx2::sum_digamma_difference(hi.data(), lo.data(), hi.size());
#endif
  return scalar::sum_digamma_difference(hi.data(), lo.data(), hi.size());
}

double sum_trigamma_pair(std::span<const double> a,
                         std::span<const double> b) {
  require_same_size(a.size(), b.size(), "sum_trigamma_pair");
  require_domain(a, "sum_trigamma_pair");
  require_domain(b, "sum_trigamma_pair");
#if defined(LERRW_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return avx2::sum_trigamma_pair(a.data(), b.data(), a.size());
#endif
  return scalar::sum_trigamma_pair(a.data(), b.data(), a.size());
}

}  // namespace lerrw::simd
