#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hyra/optimizer.hpp"
#include "hyra/selfcheck.hpp"

using namespace hyra;

namespace {

SampleSet zero_traffic_set() {
  ArrivalTrace at;
  at.samples = 2;
  at.slots = 4;
  at.bits.assign(8, 0.0);
  SeTrace se;
  se.samples = 2;
  se.slots = 4;
  se.eta.assign(8, 3.0);
  const std::vector<int> slice_of{0};
  return SampleSet::assemble(std::vector<ArrivalTrace>{at},
                             std::vector<SeTrace>{se}, slice_of, 1);
}

Scenario small_scenario(std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Scenario sc = random_tiny_scenario(rng, 2, 3, 3, 6);
  return sc;
}

}  // namespace

TEST_CASE("zero traffic needs zero resources") {
  const SampleSet samples = zero_traffic_set();
  const SlaSpec sla{SlaSpec::Mode::per_ue, {3.0}, {}};
  SearchSpec spec;
  spec.x_max = 10.0;
  spec.mode = FormulationKind::hyra;
  const OptResult result = minimize_allocation(spec, samples, sla);
  CHECK(result.feasible);
  CHECK(result.total == 0.0);
  CHECK(result.total_relaxed == 0.0);
}

TEST_CASE("shared-only search agrees with direct 1-D bisection") {
  for (const std::uint64_t seed : {41ULL, 42ULL, 43ULL}) {
    const Scenario sc = small_scenario(seed);
    const SampleSet samples = build_sample_set(sc, seed);
    const SlaSpec sla = sc.sla();

    SearchSpec spec = sc.search;
    spec.mode = FormulationKind::shared_only;
    const OptResult result = minimize_allocation(spec, samples, sla);

    const auto feasible_at = [&](double x_sh) {
      Allocation alloc;
      alloc.x_ded.assign(samples.n_slices, 0.0);
      alloc.x_sh = x_sh;
      const SimResult sim = simulate(alloc, samples);
      return sla_satisfied(sim.delays, sla, samples.slice_of,
                           samples.n_slices)
          .satisfied;
    };

    if (!result.feasible) {
      CHECK_FALSE(feasible_at(spec.x_max));
      continue;
    }
    // independent bisection on the same step lattice
    double lo = 0.0, hi = spec.x_max;
    if (feasible_at(0.0)) {
      hi = 0.0;
    } else {
      while (hi - lo > spec.grid_step / 4.0) {
        const double mid = 0.5 * (lo + hi);
        (feasible_at(mid) ? hi : lo) = mid;
      }
    }
    CAPTURE(seed);
    CHECK(std::abs(result.total - hi) <= spec.grid_step + 1e-9);
  }
}

TEST_CASE("hybrid never needs more than either pure strategy") {
  int compared = 0;
  for (const std::uint64_t seed : {7ULL, 11ULL, 13ULL, 17ULL}) {
    const Scenario sc = small_scenario(seed);
    const SampleSet samples = build_sample_set(sc, seed);
    const StrategyComparison cmp =
        compare_strategies(samples, sc.sla(), sc.search);
    if (!cmp.all_feasible) continue;
    ++compared;
    CAPTURE(seed);
    const double min_pure = std::min(cmp.dedicated.total, cmp.shared.total);
    CHECK(cmp.hyra.total <= min_pure + sc.search.grid_step + 1e-9);
    CHECK(cmp.savings_vs_baseline_mean >= -1e-12);
  }
  CHECK(compared > 0);
}

TEST_CASE("ceiling stays within one PRB per component") {
  const Scenario sc = small_scenario(19);
  const SampleSet samples = build_sample_set(sc, 19);
  SearchSpec spec = sc.search;
  spec.mode = FormulationKind::hyra;
  const OptResult result = minimize_allocation(spec, samples, sc.sla());
  if (!result.feasible) return;
  const int components = samples.n_slices + 1;
  CHECK(result.total - result.total_relaxed <
        static_cast<double>(components));
  for (int s = 0; s < samples.n_slices; ++s) {
    CHECK(result.best.x_ded[s] >= result.best_relaxed.x_ded[s] - 1e-9);
    CHECK(result.best.x_ded[s] ==
          doctest::Approx(std::ceil(result.best_relaxed.x_ded[s] - 1e-9)));
  }
  CHECK(result.best.x_sh ==
        doctest::Approx(std::ceil(result.best_relaxed.x_sh - 1e-9)));
}

TEST_CASE("search is deterministic") {
  const Scenario sc = small_scenario(23);
  const SampleSet samples = build_sample_set(sc, 23);
  SearchSpec spec = sc.search;
  spec.mode = FormulationKind::hyra;
  const OptResult a = minimize_allocation(spec, samples, sc.sla());
  const OptResult b = minimize_allocation(spec, samples, sc.sla());
  CHECK(a.total == b.total);
  CHECK(a.best.x_ded == b.best.x_ded);
  CHECK(a.best.x_sh == b.best.x_sh);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.pruned == b.pruned);
}

TEST_CASE("pruned points are never feasible") {
  const CheckResult r = check_pruning_soundness(4, 31);
  CAPTURE(r.detail);
  CHECK(r.pass);
}

TEST_CASE("infeasible at x_max is reported, not raised") {
  const Scenario sc = small_scenario(37);
  SampleSet samples = build_sample_set(sc, 37);
  SlaSpec sla = sc.sla();
  // make the budgets unreachable
  for (auto& d : sla.slice_budget_ms) d = 1e-7;
  for (double& a : samples.arrivals) a = a == 0.0 ? 5e5 : a * 1e4;
  SearchSpec spec = sc.search;
  spec.x_max = 2.0;
  spec.mode = FormulationKind::hyra;
  const OptResult result = minimize_allocation(spec, samples, sla);
  CHECK_FALSE(result.feasible);
}

TEST_CASE("comparison CSV has the documented header") {
  const Scenario sc = small_scenario(43);
  const SampleSet samples = build_sample_set(sc, 43);
  const StrategyComparison cmp =
      compare_strategies(samples, sc.sla(), sc.search);
  std::stringstream os;
  write_comparison_csv(os, cmp, samples.n_slices);
  std::string header;
  std::getline(os, header);
  if (samples.n_slices == 2)
    CHECK(header == "mode,x_ded_1,x_ded_2,x_sh,total,feasible,evals");
  else
    CHECK(header == "mode,x_ded_1,x_sh,total,feasible,evals");
}
