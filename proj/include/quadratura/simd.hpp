#pragma once

// Vector kernels shared by the evaluator and the Darboux sampler. On x86-64
// Linux they are built for AVX2 and for the baseline ISA; the loader picks one.
// Both builds use the same IEEE operations in the same order, so results do
// not depend on the machine.

#include <algorithm>
#include <cmath>
#include <cstddef>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define QUADRATURA_X86 1
#endif

#if defined(__GNUC__) || defined(__clang__)
#define QUADRATURA_RESTRICT __restrict__
#else
#define QUADRATURA_RESTRICT
#endif

#if defined(QUADRATURA_X86) && defined(__linux__) && !defined(__AVX2__)
#define QUADRATURA_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define QUADRATURA_CLONES
#endif

namespace quadratura::detail {

// Sample abscissae for `count` consecutive cells with the given edges, `s` per
// cell. With endpoints, cell c fills out[c*(s-1) .. c*(s-1)+s-1] and adjacent
// cells share their common edge; otherwise samples sit at the centres of s
// equal pieces. jd[j] == j.
QUADRATURA_CLONES inline void fill_samples(const double* edges, std::size_t count, std::size_t s,
                                           bool endpoints, const double* QUADRATURA_RESTRICT jd,
                                           double* QUADRATURA_RESTRICT out) {
  const double sd = static_cast<double>(s);
  if (endpoints) {
    for (std::size_t c = 0; c < count; ++c) {
      const double e0 = edges[c], e1 = edges[c + 1];
      const double step = (e1 - e0) / (sd - 1.0);
      double* QUADRATURA_RESTRICT o = out + c * (s - 1);
      for (std::size_t j = 0; j + 1 < s; ++j) o[j] = e0 + jd[j] * step;
      o[s - 1] = e1;
    }
  } else {
    for (std::size_t c = 0; c < count; ++c) {
      const double e0 = edges[c], e1 = edges[c + 1];
      const double step = (e1 - e0) / sd;
      double* QUADRATURA_RESTRICT o = out + c * s;
      for (std::size_t j = 0; j < s; ++j) o[j] = e0 + (jd[j] + 0.5) * step;
    }
  }
}

inline bool minmax_scalar(const double* v, std::size_t n, double& lo, double& hi) {
  bool nan = false;
  for (std::size_t j = 0; j < n; ++j) {
    lo = v[j] < lo ? v[j] : lo;
    hi = v[j] > hi ? v[j] : hi;
    nan = nan || std::isnan(v[j]);
  }
  return !nan;
}

#if defined(QUADRATURA_X86)
inline bool minmax_sse2(const double* v, std::size_t n, double& lo, double& hi) {
  __m128d vlo = _mm_set1_pd(lo), vhi = _mm_set1_pd(hi);
  __m128d bad = _mm_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m128d x = _mm_loadu_pd(v + j);
    vlo = _mm_min_pd(x, vlo);  // a NaN x leaves the accumulator alone
    vhi = _mm_max_pd(x, vhi);
    bad = _mm_or_pd(bad, _mm_cmpunord_pd(x, x));
  }
  alignas(16) double l[2], h[2];
  _mm_store_pd(l, vlo);
  _mm_store_pd(h, vhi);
  lo = std::min(l[0], l[1]);
  hi = std::max(h[0], h[1]);
  const bool clean = _mm_movemask_pd(bad) == 0;
  return minmax_scalar(v + j, n - j, lo, hi) && clean;
}

__attribute__((target("avx2"))) inline bool minmax_avx2(const double* v, std::size_t n,
                                                        double& lo, double& hi) {
  __m256d vlo = _mm256_set1_pd(lo), vhi = _mm256_set1_pd(hi);
  __m256d bad = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d x = _mm256_loadu_pd(v + j);
    vlo = _mm256_min_pd(x, vlo);
    vhi = _mm256_max_pd(x, vhi);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  }
  alignas(32) double l[4], h[4];
  _mm256_store_pd(l, vlo);
  _mm256_store_pd(h, vhi);
  lo = std::min(std::min(l[0], l[1]), std::min(l[2], l[3]));
  hi = std::max(std::max(h[0], h[1]), std::max(h[2], h[3]));
  const bool clean = _mm256_movemask_pd(bad) == 0;
  return minmax_scalar(v + j, n - j, lo, hi) && clean;
}
#endif

/// Folds v[0..n) into lo/hi. Returns false if any element is NaN, in which
/// case lo/hi only reflect the defined elements.
inline bool minmax(const double* v, std::size_t n, double& lo, double& hi) {
#if defined(QUADRATURA_X86)
  static const bool avx2 = __builtin_cpu_supports("avx2");
  return avx2 ? minmax_avx2(v, n, lo, hi) : minmax_sse2(v, n, lo, hi);
#else
  return minmax_scalar(v, n, lo, hi);
#endif
}

}  // namespace quadratura::detail
