#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops of the scheduler and queue simulator.
//
// Each kernel has a scalar reference implementation and, where the build
// target supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active
// variant is picked once at startup from CPU capabilities and can be
// overridden with force_backend() or the HYRA_BACKEND environment variable
// (values: scalar, avx2, neon).
//
// Elementwise kernels (excess_fill, queue_step, prb_capacity) are bit-exact
// across backends: every lane applies the same IEEE operations in the same
// per-element order. The reduction excess_sum reassociates partial sums in
// the vector variants, so cross-backend agreement there is to rounding, not
// bits; callers that need a fixed summation order pin the scalar backend.

namespace hyra::kernels {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
bool backend_available(Backend b);
// Switches the dispatch table. Throws if the backend is not available on
// this machine. Not safe against concurrent kernel calls.
void force_backend(Backend b);
std::string_view backend_name(Backend b);

// Water-filling residual: sum_i max(level - floors[i], 0).
double excess_sum(double level, std::span<const double> floors);

// out[i] = max(level - floors[i], 0). out may alias floors.
void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out);

// Work-conserving queue step, elementwise:
//   served[i] = min(backlog[i] + arrivals[i], capacity[i])
//   next[i]   = backlog[i] + arrivals[i] - served[i]
// next may alias backlog.
void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served);

// out[i] = n_sym * eta[i] * prbs[i]
void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out);

// Per-backend entry points, exposed so the equivalence tests can drive each
// variant directly regardless of the active dispatch.
namespace scalar {
double excess_sum(double level, std::span<const double> floors);
void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out);
void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served);
void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out);
}  // namespace scalar

#if defined(HYRA_HAVE_AVX2)
namespace avx2 {
double excess_sum(double level, std::span<const double> floors);
void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out);
void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served);
void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out);
}  // namespace avx2
#endif

#if defined(HYRA_HAVE_NEON)
namespace neon {
double excess_sum(double level, std::span<const double> floors);
void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out);
void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served);
void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out);
}  // namespace neon
#endif

}  // namespace hyra::kernels
