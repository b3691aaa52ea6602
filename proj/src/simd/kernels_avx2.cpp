// Compiled with -mavx2 -mfma. Keep this TU free of inline library code that
// the linker could merge into callers running on older CPUs: raw pointers
// only, no <span>/<vector>/<cmath>.

#include "lerrw/simd/kernels.hpp"
#include "lerrw/special_functions.hpp"

#include <immintrin.h>

namespace lerrw::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

// fdlibm split of ln 2; e * kLn2Hi is exact for |e| < 2^20.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kSqrt2 = 1.41421356237309504880;

// ln x for positive normal x. x = 2^e * m with m in [sqrt(1/2), sqrt(2)),
// ln m = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716; eleven odd terms of
// the atanh series reach 1e-17.
inline __m256d vlog(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256i lo32 = _mm256_permutevar8x32_epi32(
      biased, _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7));
  __m256d e = _mm256_sub_pd(_mm256_cvtepi32_pd(_mm256_castsi256_si128(lo32)),
                            _mm256_set1_pd(1023.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);

  __m256d p = _mm256_set1_pd(1.0 / 23.0);
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 21.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 19.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, s2, _mm256_set1_pd(1.0 / 3.0));
  // 2 s (1 + s2 * p), keeping the leading 2s exact.
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d lnm = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), p, two_s);

  return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi),
                         _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), lnm));
}

template <std::size_t N>
inline __m256d vhorner(const double (&c)[N], __m256d r) {
  __m256d acc = _mm256_set1_pd(c[N - 1]);
  for (std::size_t k = N - 1; k-- > 0;)
    acc = _mm256_fmadd_pd(acc, r, _mm256_set1_pd(c[k]));
  return acc;
}

inline __m256d vdigamma(__m256d z) {
  const __m256d thr = _mm256_set1_pd(kAsymptoticThreshold);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d w = z;
  __m256d shift = _mm256_setzero_pd();
  for (;;) {
    const __m256d below = _mm256_cmp_pd(w, thr, _CMP_LT_OQ);
    if (_mm256_movemask_pd(below) == 0) break;
    shift = _mm256_add_pd(shift, _mm256_and_pd(below, _mm256_div_pd(one, w)));
    w = _mm256_add_pd(w, _mm256_and_pd(below, one));
  }
  const __m256d inv = _mm256_div_pd(one, w);
  const __m256d r = _mm256_mul_pd(inv, inv);
  const __m256d series = _mm256_mul_pd(r, vhorner(detail::kDigammaSeries, r));
  __m256d v = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), inv, vlog(w));
  v = _mm256_sub_pd(v, series);
  return _mm256_sub_pd(v, shift);
}

inline __m256d vtrigamma(__m256d z) {
  const __m256d thr = _mm256_set1_pd(kAsymptoticThreshold);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d w = z;
  __m256d shift = _mm256_setzero_pd();
  for (;;) {
    const __m256d below = _mm256_cmp_pd(w, thr, _CMP_LT_OQ);
    if (_mm256_movemask_pd(below) == 0) break;
    const __m256d inv = _mm256_div_pd(one, w);
    shift = _mm256_add_pd(shift, _mm256_and_pd(below, _mm256_mul_pd(inv, inv)));
    w = _mm256_add_pd(w, _mm256_and_pd(below, one));
  }
  const __m256d inv = _mm256_div_pd(one, w);
  const __m256d r = _mm256_mul_pd(inv, inv);
  const __m256d series =
      _mm256_mul_pd(_mm256_mul_pd(r, vhorner(detail::kTrigammaSeries, r)), inv);
  const __m256d tail = _mm256_add_pd(
      _mm256_fmadd_pd(_mm256_set1_pd(0.5), r, inv), series);
  return _mm256_add_pd(shift, tail);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Loads up to four values, padding the rest with 1.0 (a harmless argument
// for every kernel here).
inline __m256d load_partial(const double* p, std::size_t count) {
  alignas(32) double buf[kLanes] = {1.0, 1.0, 1.0, 1.0};
  for (std::size_t j = 0; j < count; ++j) buf[j] = p[j];
  return _mm256_load_pd(buf);
}

template <class Kernel>
void map_batch(const double* z, std::size_t n, double* out, Kernel kernel) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(out + i, kernel(_mm256_loadu_pd(z + i)));
  if (i < n) {
    alignas(32) double buf[kLanes];
    _mm256_store_pd(buf, kernel(load_partial(z + i, n - i)));
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] = buf[j];
  }
}

}  // namespace

void log_batch(const double* x, std::size_t n, double* out) noexcept {
  map_batch(x, n, out, [](__m256d v) { return vlog(v); });
}

void digamma_batch(const double* z, std::size_t n, double* out) noexcept {
  map_batch(z, n, out, [](__m256d v) { return vdigamma(v); });
}

void trigamma_batch(const double* z, std::size_t n, double* out) noexcept {
  map_batch(z, n, out, [](__m256d v) { return vtrigamma(v); });
}

double sum_digamma_difference(const double* hi, const double* lo,
                              std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(vdigamma(_mm256_loadu_pd(hi + i)),
                                    vdigamma(_mm256_loadu_pd(lo + i)));
    acc = _mm256_add_pd(acc, d);
  }
  if (i < n) {
    // Padding is 1.0 on both sides, so padded lanes contribute exactly 0.
    const __m256d d = _mm256_sub_pd(vdigamma(load_partial(hi + i, n - i)),
                                    vdigamma(load_partial(lo + i, n - i)));
    acc = _mm256_add_pd(acc, d);
  }
  return hsum(acc);
}

double sum_trigamma_pair(const double* a, const double* b,
                         std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = _mm256_add_pd(acc, _mm256_add_pd(vtrigamma(_mm256_loadu_pd(a + i)),
                                           vtrigamma(_mm256_loadu_pd(b + i))));
  }
  double tail = 0.0;
  if (i < n) {
    alignas(32) double buf[kLanes];
    _mm256_store_pd(buf, _mm256_add_pd(vtrigamma(load_partial(a + i, n - i)),
                                       vtrigamma(load_partial(b + i, n - i))));
    for (std::size_t j = 0; i + j < n; ++j) tail += buf[j];
  }
  return hsum(acc) + tail;
}

}  // namespace lerrw::simd::avx2
