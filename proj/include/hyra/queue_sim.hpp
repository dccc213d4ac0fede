#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hyra/sample_set.hpp"
#include "hyra/scheduler.hpp"

namespace hyra {

// One UE-slot of the work-conserving queue recursion:
//   served = min(backlog + arrivals, capacity); next = backlog + arrivals - served
struct QueueStep {
  double next_backlog;
  double served;
};
QueueStep step_queue(double backlog, double arrivals, double capacity);

// End-of-slot backlog and service for every (ue, k, t).
struct QueueStates {
  int n_ues = 0, samples = 0, slots = 0;
  std::vector<double> backlog;  // [(k*T+t)*n_ues + i]
  std::vector<double> served;   // same layout

  std::size_t idx(int i, int k, int t) const {
    return (static_cast<std::size_t>(k) * slots + t) * n_ues + i;
  }
};

// Little's-law delays: per (ue, sample) ratio of summed end-of-slot backlog
// to summed arrivals, the SAA mean over samples, and slice-level means.
// Samples with zero total arrivals contribute delay 0 and are flagged.
struct DelayReport {
  int n_ues = 0, samples = 0;
  std::vector<double> per_sample;  // [i*K + k], slots
  std::vector<double> mean_delay;  // per UE
  std::vector<double> slice_mean;  // per slice
  std::vector<std::uint8_t> ue_had_arrivals;  // any arrivals across samples

  double delay(int i, int k) const {
    return per_sample[static_cast<std::size_t>(i) * samples + k];
  }
};

struct SimResult {
  QueueStates queues;
  DelayReport delays;
};

// Scratch buffers reused across candidate allocations during search.
struct SimWorkspace {
  SlotSchedule schedule;
  std::vector<double> totals;
  std::vector<double> capacity;
  std::vector<double> state;  // current backlog per (k, ue)
};

SimResult simulate(const Allocation& alloc, const SampleSet& samples);
SimResult simulate(const Allocation& alloc, const SampleSet& samples,
                   SlotSolver& solver, SimWorkspace& ws);

// Delay budgets in ms (= slots). per_ue mode checks every UE against its
// slice budget (or a per-UE override); slice_aggregated checks the mean
// delay across each slice's UEs.
struct SlaSpec {
  enum class Mode { per_ue, slice_aggregated };
  Mode mode = Mode::per_ue;
  std::vector<double> slice_budget_ms;
  // Optional per-UE budgets (indexed by global UE id); empty means every UE
  // inherits its slice budget.
  std::vector<double> ue_budget_ms;

  void validate(int n_slices, int n_ues) const;
};

const char* to_string(SlaSpec::Mode m);
SlaSpec::Mode sla_mode_from_string(const std::string& name);

struct SlaCheck {
  bool satisfied = false;
  double worst_margin = 0.0;       // budget - achieved, at the tightest row
  std::vector<double> margins;     // per UE (per_ue) or per slice (aggregated)
};

SlaCheck sla_satisfied(const DelayReport& report, const SlaSpec& sla,
                       std::span<const int> slice_of, int n_slices);

// CSV `ue_id,slice,d_mean,d_k0,...`
void write_delay_csv(std::ostream& os, const DelayReport& report,
                     std::span<const int> slice_of);

}  // namespace hyra
