#pragma once

#include <span>
#include <vector>

#include "hyra/channel.hpp"
#include "hyra/traffic.hpp"

namespace hyra {

// Arrival and SE traces for every UE over K samples and T slots, interleaved
// so one (k,t) slot's per-UE values are contiguous - that is the access
// pattern of the per-slot scheduler.
struct SampleSet {
  int n_ues = 0;
  int n_slices = 0;
  int samples = 0;  // K
  int slots = 0;    // T
  std::vector<int> slice_of;     // per UE
  std::vector<double> arrivals;  // [(k*T+t)*n_ues + i], whole bits
  std::vector<double> eta;       // same layout, bits per symbol

  static SampleSet assemble(std::span<const ArrivalTrace> arrival_traces,
                            std::span<const SeTrace> se_traces,
                            std::span<const int> slice_of, int n_slices);

  std::size_t slot_offset(int k, int t) const {
    return (static_cast<std::size_t>(k) * slots + t) * n_ues;
  }
  std::span<const double> arrivals_at(int k, int t) const {
    return {arrivals.data() + slot_offset(k, t),
            static_cast<std::size_t>(n_ues)};
  }
  std::span<const double> eta_at(int k, int t) const {
    return {eta.data() + slot_offset(k, t), static_cast<std::size_t>(n_ues)};
  }
  double arrival(int i, int k, int t) const {
    return arrivals[slot_offset(k, t) + i];
  }
  double se(int i, int k, int t) const { return eta[slot_offset(k, t) + i]; }

  std::vector<int> ues_of_slice(int s) const;
  double total_arrival_bits() const;
  void validate() const;
};

}  // namespace hyra
