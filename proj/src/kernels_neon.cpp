// NEON (aarch64) variants, mirroring the AVX2 lane structure with
// float64x2_t. Guarded at build time; the dispatcher only installs these on
// aarch64 hosts.

#include "hyra/kernels.hpp"

#if defined(HYRA_HAVE_NEON)

#include <arm_neon.h>

#include <algorithm>
#include <cstddef>

namespace hyra::kernels::neon {

double excess_sum(double level, std::span<const double> floors) {
  const std::size_t n = floors.size();
  const double* f = floors.data();
  const float64x2_t vlevel = vdupq_n_f64(level);
  const float64x2_t vzero = vdupq_n_f64(0.0);
  float64x2_t vacc = vzero;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vf = vld1q_f64(f + i);
    vacc = vaddq_f64(vacc, vmaxq_f64(vsubq_f64(vlevel, vf), vzero));
  }
  double acc = vgetq_lane_f64(vacc, 0) + vgetq_lane_f64(vacc, 1);
  for (; i < n; ++i) acc += std::max(level - f[i], 0.0);
  return acc;
}

void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out) {
  const std::size_t n = floors.size();
  const double* f = floors.data();
  double* o = out.data();
  const float64x2_t vlevel = vdupq_n_f64(level);
  const float64x2_t vzero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vf = vld1q_f64(f + i);
    vst1q_f64(o + i, vmaxq_f64(vsubq_f64(vlevel, vf), vzero));
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
  for (; i + 2 <= n; i += 2) {
    const float64x2_t pending = vaddq_f64(vld1q_f64(q + i), vld1q_f64(a + i));
    const float64x2_t s = vminq_f64(pending, vld1q_f64(c + i));
    vst1q_f64(sv + i, s);
    vst1q_f64(qn + i, vsubq_f64(pending, s));
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
  const float64x2_t vsym = vdupq_n_f64(n_sym);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod =
        vmulq_f64(vmulq_f64(vsym, vld1q_f64(e + i)), vld1q_f64(y + i));
    vst1q_f64(o + i, prod);
  }
  for (; i < n; ++i) o[i] = n_sym * e[i] * y[i];
}

}  // namespace hyra::kernels::neon

#endif  // HYRA_HAVE_NEON
