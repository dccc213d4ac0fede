#include "hyra/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hyra::kernels {

namespace {

struct Dispatch {
  double (*excess_sum)(double, std::span<const double>);
  void (*excess_fill)(double, std::span<const double>, std::span<double>);
  void (*queue_step)(std::span<const double>, std::span<const double>,
                     std::span<const double>, std::span<double>,
                     std::span<double>);
  void (*prb_capacity)(std::span<const double>, std::span<const double>,
                       double, std::span<double>);
};

constexpr Dispatch kScalar{scalar::excess_sum, scalar::excess_fill,
                           scalar::queue_step, scalar::prb_capacity};

#if defined(HYRA_HAVE_AVX2)
constexpr Dispatch kAvx2{avx2::excess_sum, avx2::excess_fill, avx2::queue_step,
                         avx2::prb_capacity};
#endif
#if defined(HYRA_HAVE_NEON)
constexpr Dispatch kNeon{neon::excess_sum, neon::excess_fill, neon::queue_step,
                         neon::prb_capacity};
#endif

Backend detect_backend() {
  if (const char* env = std::getenv("HYRA_BACKEND")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
    if (v == "neon" && backend_available(Backend::neon)) return Backend::neon;
    // Unknown or unavailable value: fall through to auto-detection.
  }
#if defined(HYRA_HAVE_AVX2)
  if (backend_available(Backend::avx2)) return Backend::avx2;
#endif
#if defined(HYRA_HAVE_NEON)
  if (backend_available(Backend::neon)) return Backend::neon;
#endif
  return Backend::scalar;
}

struct State {
  Backend backend = detect_backend();
  const Dispatch* table = nullptr;
  State() { table = table_for(backend); }
  static const Dispatch* table_for(Backend b) {
    switch (b) {
      case Backend::scalar:
        return &kScalar;
      case Backend::avx2:
#if defined(HYRA_HAVE_AVX2)
        return &kAvx2;
#else
        break;
#endif
      case Backend::neon:
#if defined(HYRA_HAVE_NEON)
        return &kNeon;
#else
        break;
#endif
    }
    return &kScalar;
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(HYRA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::neon:
#if defined(HYRA_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return state().backend; }

void force_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error(std::string("kernel backend unavailable: ") +
                             std::string(backend_name(b)));
  state().backend = b;
  state().table = State::table_for(b);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

double excess_sum(double level, std::span<const double> floors) {
  return state().table->excess_sum(level, floors);
}

void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out) {
  state().table->excess_fill(level, floors, out);
}

void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served) {
  state().table->queue_step(backlog, arrivals, capacity, next, served);
}

void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out) {
  state().table->prb_capacity(eta, prbs, n_sym, out);
}

}  // namespace hyra::kernels
