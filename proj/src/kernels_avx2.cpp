// AVX2 variants. Compiled with -mavx2 only in this translation unit; callers
// reach these through the dispatch table after a runtime CPU check.
//
// No FMA: mul/add stay separate so the elementwise kernels round exactly like
// the scalar reference.

#include "hyra/kernels.hpp"

#if defined(HYRA_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

namespace hyra::kernels::avx2 {

double excess_sum(double level, std::span<const double> floors) {
  const std::size_t n = floors.size();
  const double* f = floors.data();
  const __m256d vlevel = _mm256_set1_pd(level);
  const __m256d vzero = _mm256_setzero_pd();
  __m256d vacc = vzero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vf = _mm256_loadu_pd(f + i);
    vacc = _mm256_add_pd(vacc, _mm256_max_pd(_mm256_sub_pd(vlevel, vf), vzero));
  }
  // lanes 0..3 then the scalar tail, in a fixed order
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vacc);
  double acc = ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
  for (; i < n; ++i) acc += std::max(level - f[i], 0.0);
  return acc;
}

void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out) {
  const std::size_t n = floors.size();
  const double* f = floors.data();
  double* o = out.data();
  const __m256d vlevel = _mm256_set1_pd(level);
  const __m256d vzero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vf = _mm256_loadu_pd(f + i);
    _mm256_storeu_pd(o + i, _mm256_max_pd(_mm256_sub_pd(vlevel, vf), vzero));
  }
  for (; i < n; ++i) o[i] = std::max(level - f[i], 0.0);
}

void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served) {
  const std::size_t n = backlog.size();
  const double* q = backlog.data();
  const double* a = arrivals.data();
  const double* c = capacity.data();
  double* qn = next.data();
  double* sv = served.data();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pending = _mm256_add_pd(_mm256_loadu_pd(q + i),
                                          _mm256_loadu_pd(a + i));
    const __m256d s = _mm256_min_pd(pending, _mm256_loadu_pd(c + i));
    _mm256_storeu_pd(sv + i, s);
    _mm256_storeu_pd(qn + i, _mm256_sub_pd(pending, s));
  }
  for (; i < n; ++i) {
    const double pending = q[i] + a[i];
    const double s = std::min(pending, c[i]);
    sv[i] = s;
    qn[i] = pending - s;
  }
}

void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out) {
  const std::size_t n = eta.size();
  const double* e = eta.data();
  const double* y = prbs.data();
  double* o = out.data();
  const __m256d vsym = _mm256_set1_pd(n_sym);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(
        _mm256_mul_pd(vsym, _mm256_loadu_pd(e + i)), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(o + i, prod);
  }
  for (; i < n; ++i) o[i] = n_sym * e[i] * y[i];
}

}  // namespace hyra::kernels::avx2

#endif  // HYRA_HAVE_AVX2
