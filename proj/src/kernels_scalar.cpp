#include "hyra/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace hyra::kernels::scalar {

double excess_sum(double level, std::span<const double> floors) {
  double acc = 0.0;
  for (const double f : floors) acc += std::max(level - f, 0.0);
  return acc;
}

void excess_fill(double level, std::span<const double> floors,
                 std::span<double> out) {
  for (std::size_t i = 0; i < floors.size(); ++i)
    out[i] = std::max(level - floors[i], 0.0);
}

void queue_step(std::span<const double> backlog,
                std::span<const double> arrivals,
                std::span<const double> capacity, std::span<double> next,
                std::span<double> served) {
  for (std::size_t i = 0; i < backlog.size(); ++i) {
    const double pending = backlog[i] + arrivals[i];
    const double s = std::min(pending, capacity[i]);
    served[i] = s;
    next[i] = pending - s;
  }
}

void prb_capacity(std::span<const double> eta, std::span<const double> prbs,
                  double n_sym, std::span<double> out) {
  for (std::size_t i = 0; i < eta.size(); ++i)
    out[i] = n_sym * eta[i] * prbs[i];
}

}  // namespace hyra::kernels::scalar
