#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hyra/mip.hpp"
#include "hyra/queue_sim.hpp"
#include "hyra/sample_set.hpp"

namespace hyra {

// Grid-then-refine search over allocations. Feasibility is a threshold
// function of the allocation, and componentwise-larger allocations never
// increase any delay, which makes infeasibility pruning exact.
struct SearchSpec {
  double grid_step = 1.0;
  double x_max = 100.0;
  int refinement_rounds = 2;
  FormulationKind mode = FormulationKind::hyra;

  void validate() const;
};

struct OptResult {
  Allocation best;          // componentwise ceiling of best_relaxed
  Allocation best_relaxed;  // continuous incumbent after refinement
  double total = 0.0;
  double total_relaxed = 0.0;
  bool feasible = false;
  long evaluations = 0;  // simulations run
  long pruned = 0;       // candidates skipped by dominance
  // Sample of pruned points kept for the soundness audit.
  std::vector<Allocation> pruned_points;
};

// Minimal-total feasible allocation for the given mode. Components outside
// the mode (x_sh for dedicated_only, x_ded for shared_only) are pinned to 0.
// `seed_candidates` are extra allocations evaluated up front (the strategy
// comparison passes each baseline's optimum so the hybrid search starts from
// every pure strategy).
OptResult minimize_allocation(const SearchSpec& spec, const SampleSet& samples,
                              const SlaSpec& sla,
                              std::span<const Allocation> seed_candidates = {});

struct StrategyComparison {
  OptResult hyra;
  OptResult dedicated;
  OptResult shared;
  // 1 - hyra_total / mean(baseline totals); 0 when the baselines are free.
  double savings_vs_baseline_mean = 0.0;
  bool all_feasible = false;
};

StrategyComparison compare_strategies(const SampleSet& samples,
                                      const SlaSpec& sla,
                                      const SearchSpec& search);

double savings_vs_baselines(double hyra_total, double ded_total,
                            double sh_total);

// CSV `mode,x_ded_1..S,x_sh,total,feasible,evals`
void write_comparison_csv(std::ostream& os, const StrategyComparison& cmp,
                          int n_slices);

}  // namespace hyra
