#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hyra/kernels.hpp"
#include "hyra/rng.hpp"

using namespace hyra;

namespace {

struct BackendGuard {
  kernels::Backend saved = kernels::active_backend();
  ~BackendGuard() { kernels::force_backend(saved); }
};

std::vector<kernels::Backend> simd_backends() {
  std::vector<kernels::Backend> out;
  for (const auto b : {kernels::Backend::avx2, kernels::Backend::neon})
    if (kernels::backend_available(b)) out.push_back(b);
  return out;
}

}  // namespace

TEST_CASE("scalar excess_sum matches a long-double reference") {
  Xoshiro256pp rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 60);
    std::vector<double> floors(n);
    for (auto& f : floors) f = rng.uniform01() * 8.0;
    const double level = rng.uniform01() * 10.0;
    long double exact = 0.0L;
    for (const double f : floors)
      exact += std::max(static_cast<long double>(level) - f, 0.0L);
    CHECK(kernels::scalar::excess_sum(level, floors) ==
          doctest::Approx(static_cast<double>(exact)).epsilon(1e-14));
  }
}

TEST_CASE("simd variants agree with the scalar reference") {
  const auto variants = simd_backends();
  if (variants.empty()) return;  // nothing beyond scalar on this host

  Xoshiro256pp rng(2);
  BackendGuard guard;
  for (int trial = 0; trial < 300; ++trial) {
    // sizes around the vector width boundaries matter most
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 33);
    std::vector<double> floors(n), arrivals(n), capacity(n), prbs(n);
    for (std::size_t i = 0; i < n; ++i) {
      floors[i] = rng.uniform01() * 8.0;
      arrivals[i] = rng.uniform01() * 1500.0;
      capacity[i] = rng.uniform01() * 1200.0;
      prbs[i] = rng.uniform01() * 4.0;
    }
    const double level = rng.uniform01() * 10.0;

    std::vector<double> ref_fill(n), ref_next(n), ref_served(n), ref_cap(n);
    kernels::scalar::excess_fill(level, floors, ref_fill);
    kernels::scalar::queue_step(floors, arrivals, capacity, ref_next,
                                ref_served);
    kernels::scalar::prb_capacity(floors, prbs, 168.0, ref_cap);
    const double ref_sum = kernels::scalar::excess_sum(level, floors);

    for (const auto backend : variants) {
      kernels::force_backend(backend);
      CAPTURE(kernels::backend_name(backend));
      CAPTURE(n);

      std::vector<double> fill(n), next(n), served(n), cap(n);
      kernels::excess_fill(level, floors, fill);
      kernels::queue_step(floors, arrivals, capacity, next, served);
      kernels::prb_capacity(floors, prbs, 168.0, cap);

      // elementwise kernels are bit-exact across backends
      CHECK(fill == ref_fill);
      CHECK(next == ref_next);
      CHECK(served == ref_served);
      CHECK(cap == ref_cap);
      // the reduction reassociates, so only rounding-level drift is allowed
      CHECK(kernels::excess_sum(level, floors) ==
            doctest::Approx(ref_sum).epsilon(1e-13));
    }
    kernels::force_backend(kernels::Backend::scalar);
  }
}

TEST_CASE("queue_step kernel clamps service at capacity and conserves") {
  const std::vector<double> q{0.0, 500.0, 500.0};
  const std::vector<double> a{100.0, 100.0, 100.0};
  const std::vector<double> cap{0.0, 672.0, 400.0};
  std::vector<double> next(3), served(3);
  kernels::queue_step(q, a, cap, next, served);
  CHECK(next == std::vector<double>{100.0, 0.0, 200.0});
  CHECK(served == std::vector<double>{0.0, 600.0, 400.0});
}

TEST_CASE("excess_fill handles in-place aliasing") {
  std::vector<double> floors{0.5, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> expect{1.5, 1.0, 0.0, 0.0, 0.0};
  kernels::excess_fill(2.0, floors, floors);
  CHECK(floors == expect);
}

TEST_CASE("backend forcing rejects unavailable targets") {
  BackendGuard guard;
  CHECK(kernels::backend_available(kernels::Backend::scalar));
  kernels::force_backend(kernels::Backend::scalar);
  CHECK(kernels::active_backend() == kernels::Backend::scalar);
#if !defined(HYRA_HAVE_NEON)
  CHECK_THROWS(kernels::force_backend(kernels::Backend::neon));
#endif
}
