#pragma once

// Batched special-function kernels.
//
// Every kernel has a scalar reference implementation (plain loops over the
// functions in special_functions.hpp) and, on x86-64, an AVX2/FMA variant
// that evaluates four arguments per instruction. The variant is picked at
// runtime from CPUID; LERRW_SIMD=scalar in the environment forces the
// reference path. Results agree to a few ulp, not bitwise: the AVX2 path
// carries its own vector logarithm and reduces in four lanes.

#include <cstddef>
#include <span>
#include <string_view>

namespace lerrw::simd {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view to_string(Isa isa) noexcept;

/// Best ISA the running CPU supports (and this binary was built with).
[[nodiscard]] Isa detected_isa() noexcept;
[[nodiscard]] bool isa_available(Isa isa) noexcept;

[[nodiscard]] Isa active_isa() noexcept;
/// Throws std::invalid_argument if `isa` is not available.
void set_active_isa(Isa isa);

// Dispatching entry points. Arguments must be positive (std::domain_error
// otherwise); output spans must match the input length.
void digamma_batch(std::span<const double> z, std::span<double> out);
void trigamma_batch(std::span<const double> z, std::span<double> out);

/// sum_i [digamma(hi[i]) - digamma(lo[i])]
[[nodiscard]] double sum_digamma_difference(std::span<const double> hi,
                                            std::span<const double> lo);
/// sum_i [trigamma(a[i]) + trigamma(b[i])]
[[nodiscard]] double sum_trigamma_pair(std::span<const double> a,
                                       std::span<const double> b);

// Per-ISA implementations. Preconditions are checked by the dispatchers only.
namespace scalar {
void digamma_batch(const double* z, std::size_t n, double* out) noexcept;
void trigamma_batch(const double* z, std::size_t n, double* out) noexcept;
double sum_digamma_difference(const double* hi, const double* lo,
                              std::size_t n) noexcept;
double sum_trigamma_pair(const double* a, const double* b,
                         std::size_t n) noexcept;
}  // namespace scalar

#if defined(LERRW_HAVE_AVX2)
namespace avx2 {
void digamma_batch(const double* z, std::size_t n, double* out) noexcept;
void trigamma_batch(const double* z, std::size_t n, double* out) noexcept;
double sum_digamma_difference(const double* hi, const double* lo,
                              std::size_t n) noexcept;
double sum_trigamma_pair(const double* a, const double* b,
                         std::size_t n) noexcept;
/// Vector natural log, exposed for the equivalence tests.
void log_batch(const double* x, std::size_t n, double* out) noexcept;
}  // namespace avx2
#endif

}  // namespace lerrw::simd
