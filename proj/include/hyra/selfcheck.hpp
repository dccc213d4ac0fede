#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hyra/rng.hpp"
#include "hyra/sample_set.hpp"
#include "hyra/scenario.hpp"
#include "hyra/scheduler.hpp"

namespace hyra {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Random slot-problem instance within the ranges the property suites use.
struct SlotInstance {
  std::vector<double> etas;
  std::vector<int> slice_of;
  int n_slices = 1;
  Allocation alloc;
};

SlotInstance random_slot_instance(Xoshiro256pp& rng, int min_slices = 2,
                                  int max_slices = 5, int min_ues = 2,
                                  int max_ues = 8, double eta_lo = 0.1,
                                  double eta_hi = 7.4,
                                  double budget_hi = 20.0);

// Small random end-to-end scenario (bounded slices/UEs/K/T) for the queue
// and optimizer properties.
Scenario random_tiny_scenario(Xoshiro256pp& rng, int max_slices = 2,
                              int max_ues_per_slice = 4, int max_samples = 3,
                              int max_slots = 3);

// Individual property suites. `trials` scales the sampled instances.
CheckResult check_kernel_equivalence(std::uint64_t seed);
CheckResult check_scheduler_kkt(int trials, std::uint64_t seed);
CheckResult check_budget_exactness(int trials, std::uint64_t seed);
CheckResult check_within_slice_leveling(int trials, std::uint64_t seed);
CheckResult check_permutation_equivariance(int trials, std::uint64_t seed);
CheckResult check_coordinate_monotonicity(int trials, std::uint64_t seed);
CheckResult check_queue_conservation(int trials, std::uint64_t seed);
CheckResult check_delay_monotonicity(int trials, std::uint64_t seed);
CheckResult check_pareto_tail_recovery(std::uint64_t seed);
CheckResult check_se_autocorrelation(std::uint64_t seed);
CheckResult check_transform_equivalence_suite(int trials, std::uint64_t seed);
CheckResult check_mip_consistency(int scenario_count, std::uint64_t seed);
CheckResult check_pruning_soundness(int trials, std::uint64_t seed);
CheckResult check_determinism(std::uint64_t seed);

// Every suite, in a fixed order.
std::vector<CheckResult> run_verification(int trials, std::uint64_t seed);
bool all_passed(std::span<const CheckResult> results);
void print_check_results(std::ostream& os,
                         std::span<const CheckResult> results);

}  // namespace hyra
