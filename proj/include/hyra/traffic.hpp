#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hyra/rng.hpp"

namespace hyra {

// Pareto(alpha, x_m): CDF 1 - (scale/x)^alpha for x >= scale.
struct ParetoSpec {
  double alpha = 1.5;  // tail index; (1,2] is the heavy-tailed regime
  double scale = 1.0;  // minimum value x_m (ms for gaps, bits for sizes)

  // Throws std::invalid_argument on alpha <= 1 (infinite mean) or scale <= 0.
  void validate() const;
  double mean() const;  // alpha*scale/(alpha-1)
  bool light_tailed() const { return alpha > 2.0; }
};

// Inverse-CDF draw: x = scale * u^(-1/alpha), u ~ U(0,1]. The transform is
// pinned so golden vectors stay portable.
double pareto_draw(const ParetoSpec& spec, Xoshiro256pp& rng);
std::vector<double> pareto_sample(const ParetoSpec& spec, Xoshiro256pp& rng,
                                  std::size_t n);

// Bursty source: Pareto inter-arrival gaps (ms) and Pareto packet sizes
// (bits). When target_load_bits_per_ms is set, the packet-size scale is
// solved so that mean(size)/mean(gap) equals the target; this keeps load
// comparable across tail-index sweeps.
struct TrafficSpec {
  ParetoSpec inter_arrival_ms{1.5, 1.0};
  ParetoSpec packet_size_bits{1.5, 4000.0};
  std::optional<double> target_load_bits_per_ms;

  void validate() const;
  // Copy with the packet-size scale recomputed from the target load (no-op
  // when no target is set).
  TrafficSpec resolved() const;
  double mean_load_bits_per_ms() const;
};

// Per-UE arrival grid A(k,t) in whole bits, K x T.
struct ArrivalTrace {
  int samples = 0;  // K
  int slots = 0;    // T
  std::vector<double> bits;  // row-major [k][t], integer-valued

  double& at(int k, int t) { return bits[static_cast<std::size_t>(k) * slots + t]; }
  double at(int k, int t) const { return bits[static_cast<std::size_t>(k) * slots + t]; }
};

// Packets are placed at cumulative gap times within [0, T) and all bits of a
// packet land in slot floor(tau). Each (UE, k) pair draws from its own
// derived stream, so generation order never changes the result.
ArrivalTrace generate_arrival_trace(const TrafficSpec& spec, int samples,
                                    int slots, std::uint64_t master_seed,
                                    std::uint64_t global_ue_id);

std::vector<ArrivalTrace> generate_arrivals(const TrafficSpec& spec,
                                            int ue_count, int samples,
                                            int slots,
                                            std::uint64_t master_seed,
                                            std::uint64_t first_ue_id = 0);

// Hill estimator of the tail index over the k_top largest samples.
double hill_tail_index(std::span<const double> samples, std::size_t k_top);

// CSV `ue_id,k,t,bits`, one row per nonzero slot.
void write_arrivals_csv(std::ostream& os,
                        std::span<const ArrivalTrace> traces);
// Missing rows read back as zero; out-of-range indices are an error.
std::vector<ArrivalTrace> read_arrivals_csv(std::istream& is, int ue_count,
                                            int samples, int slots);

}  // namespace hyra
