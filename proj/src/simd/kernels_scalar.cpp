#include "lerrw/simd/kernels.hpp"
#include "lerrw/special_functions.hpp"

namespace lerrw::simd::scalar {

void digamma_batch(const double* z, std::size_t n, double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = lerrw::digamma(z[i]);
}

void trigamma_batch(const double* z, std::size_t n, double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = lerrw::trigamma(z[i]);
}

double sum_digamma_difference(const double* hi, const double* lo,
                              std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += lerrw::digamma(hi[i]) - lerrw::digamma(lo[i]);
  return acc;
}

double sum_trigamma_pair(const double* a, const double* b,
                         std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += lerrw::trigamma(a[i]) + lerrw::trigamma(b[i]);
  return acc;
}

}  // namespace lerrw::simd::scalar
