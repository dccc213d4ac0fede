#include "hyra/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hyra/kernels.hpp"
#include "hyra/mip.hpp"
#include "hyra/optimizer.hpp"
#include "hyra/queue_sim.hpp"

namespace hyra {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

CheckResult make_result(std::string name, bool pass, std::string detail) {
  return {std::move(name), pass, std::move(detail)};
}

int rand_int(Xoshiro256pp& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform01() * (hi - lo + 1)) % (hi - lo + 1);
}

}  // namespace

SlotInstance random_slot_instance(Xoshiro256pp& rng, int min_slices,
                                  int max_slices, int min_ues, int max_ues,
                                  double eta_lo, double eta_hi,
                                  double budget_hi) {
  SlotInstance inst;
  inst.n_slices = rand_int(rng, min_slices, max_slices);
  inst.alloc.x_ded.resize(inst.n_slices);
  for (int s = 0; s < inst.n_slices; ++s) {
    const int ues = rand_int(rng, min_ues, max_ues);
    for (int u = 0; u < ues; ++u) {
      inst.etas.push_back(eta_lo + rng.uniform01() * (eta_hi - eta_lo));
      inst.slice_of.push_back(s);
    }
    inst.alloc.x_ded[s] =
        rng.uniform01() < 0.2 ? 0.0 : rng.uniform01() * budget_hi;
  }
  inst.alloc.x_sh = rng.uniform01() < 0.2 ? 0.0 : rng.uniform01() * budget_hi;
  return inst;
}

Scenario random_tiny_scenario(Xoshiro256pp& rng, int max_slices,
                              int max_ues_per_slice, int max_samples,
                              int max_slots) {
  Scenario sc;
  sc.slices.clear();
  const int n_slices = rand_int(rng, 1, max_slices);
  static const char* kProfiles[3] = {"pedestrian", "vehicular", "urban"};
  for (int s = 0; s < n_slices; ++s) {
    SliceConfig slice;
    slice.ue_count = rand_int(rng, 1, max_ues_per_slice);
    slice.delay_budget_ms = 1.0 + rng.uniform01() * 7.0;
    slice.traffic.inter_arrival_ms = {1.2 + rng.uniform01() * 0.8,
                                      0.3 + rng.uniform01() * 0.7};
    slice.traffic.packet_size_bits = {1.2 + rng.uniform01() * 0.8, 1000.0};
    slice.traffic.target_load_bits_per_ms = 200.0 + rng.uniform01() * 600.0;
    slice.channel.profile = kProfiles[rand_int(rng, 0, 2)];
    sc.slices.push_back(slice);
  }
  sc.samples = rand_int(rng, 1, max_samples);
  sc.slots = rand_int(rng, 2, max_slots);
  sc.seeds = {rng.next()};
  sc.search.grid_step = 1.0;
  sc.search.x_max = 40.0;
  sc.search.refinement_rounds = 2;
  sc.mip.x_upper = sc.search.x_max;
  return sc;
}

CheckResult check_kernel_equivalence(std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x4B, 0, 0));
  const kernels::Backend original = kernels::active_backend();

  double worst_reduction = 0.0;
  bool elementwise_exact = true;

  std::vector<kernels::Backend> variants;
  for (const auto b : {kernels::Backend::avx2, kernels::Backend::neon})
    if (kernels::backend_available(b)) variants.push_back(b);

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 70);
    std::vector<double> floors(n), arrivals(n), capacity(n), prbs(n);
    for (std::size_t i = 0; i < n; ++i) {
      floors[i] = rng.uniform01() * 10.0;
      arrivals[i] = rng.uniform01() * 2000.0;
      capacity[i] = rng.uniform01() * 1500.0;
      prbs[i] = rng.uniform01() * 5.0;
    }
    const double level = rng.uniform01() * 12.0;

    const double ref_sum = kernels::scalar::excess_sum(level, floors);
    long double exact = 0.0L;
    for (const double f : floors)
      exact += std::max(static_cast<long double>(level) - f, 0.0L);

    std::vector<double> ref_fill(n), ref_next(n), ref_served(n), ref_cap(n);
    kernels::scalar::excess_fill(level, floors, ref_fill);
    kernels::scalar::queue_step(floors, arrivals, capacity, ref_next,
                                ref_served);
    kernels::scalar::prb_capacity(floors, prbs, kSymbolsPerPrb, ref_cap);

    const double scale = std::max(1.0, std::abs(ref_sum));
    worst_reduction = std::max(
        worst_reduction, std::abs(ref_sum - static_cast<double>(exact)) / scale);

    for (const auto backend : variants) {
      kernels::force_backend(backend);
      worst_reduction =
          std::max(worst_reduction,
                   std::abs(kernels::excess_sum(level, floors) - ref_sum) / scale);
      std::vector<double> fill(n), next(n), served(n), cap(n);
      kernels::excess_fill(level, floors, fill);
      kernels::queue_step(floors, arrivals, capacity, next, served);
      kernels::prb_capacity(floors, prbs, kSymbolsPerPrb, cap);
      elementwise_exact = elementwise_exact && fill == ref_fill &&
                          next == ref_next && served == ref_served &&
                          cap == ref_cap;
    }
    kernels::force_backend(kernels::Backend::scalar);
  }
  kernels::force_backend(original);

  const bool pass = elementwise_exact && worst_reduction <= 1e-12;
  std::string detail = "backends:";
  detail += " scalar";
  for (const auto b : variants) {
    detail += ' ';
    detail += std::string(kernels::backend_name(b));
  }
  detail += ", elementwise " + std::string(elementwise_exact ? "exact" : "DIFFER") +
            ", reduction drift " + fmt(worst_reduction);
  return make_result("kernel_equivalence", pass, detail);
}

CheckResult check_scheduler_kkt(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x52, 0, 0));
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const SlotInstance inst = random_slot_instance(rng);
    const SlotSchedule schedule =
        schedule_slot(inst.alloc, inst.etas, inst.slice_of, inst.n_slices);
    const KktReport report = kkt_residuals(schedule, inst.alloc, inst.etas,
                                           inst.slice_of, inst.n_slices);
    worst = std::max(worst, report.max_residual());
  }
  return make_result("scheduler_kkt", worst <= 1e-8,
                     "max residual " + fmt(worst) + " over " +
                         std::to_string(trials) + " instances");
}

CheckResult check_budget_exactness(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x42, 0, 0));
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const SlotInstance inst = random_slot_instance(rng);
    const SlotSchedule schedule =
        schedule_slot(inst.alloc, inst.etas, inst.slice_of, inst.n_slices);
    std::vector<double> used(inst.n_slices, 0.0);
    double sh_used = 0.0;
    for (std::size_t i = 0; i < inst.etas.size(); ++i) {
      used[inst.slice_of[i]] += schedule.y_ded[i];
      sh_used += schedule.y_sh[i];
    }
    for (int s = 0; s < inst.n_slices; ++s)
      if (inst.alloc.x_ded[s] > 0.0)
        worst = std::max(worst, std::abs(used[s] - inst.alloc.x_ded[s]));
    if (inst.alloc.x_sh > 0.0)
      worst = std::max(worst, std::abs(sh_used - inst.alloc.x_sh));
  }
  return make_result("budget_exactness", worst <= 1e-9,
                     "max budget error " + fmt(worst));
}

CheckResult check_within_slice_leveling(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x57, 0, 0));
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const SlotInstance inst = random_slot_instance(rng);
    const SlotSchedule schedule =
        schedule_slot(inst.alloc, inst.etas, inst.slice_of, inst.n_slices);
    // equal water height among dedicated-active UEs with no shared top-up
    for (std::size_t i = 0; i < inst.etas.size(); ++i)
      for (std::size_t j = i + 1; j < inst.etas.size(); ++j) {
        if (inst.slice_of[i] != inst.slice_of[j]) continue;
        if (!(schedule.y_ded[i] > 0.0 && schedule.y_ded[j] > 0.0)) continue;
        if (schedule.y_sh[i] != 0.0 || schedule.y_sh[j] != 0.0) continue;
        const double height_i = 1.0 / inst.etas[i] + schedule.y_ded[i];
        const double height_j = 1.0 / inst.etas[j] + schedule.y_ded[j];
        worst = std::max(worst, std::abs(height_i - height_j));
      }
  }
  return make_result("within_slice_leveling", worst <= 1e-8,
                     "max height gap " + fmt(worst));
}

CheckResult check_permutation_equivariance(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x50, 0, 0));
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const SlotInstance inst = random_slot_instance(rng);
    const std::size_t n = inst.etas.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i)
      std::swap(perm[i - 1],
                perm[static_cast<std::size_t>(rng.uniform01() * i)]);

    std::vector<double> etas_p(n);
    std::vector<int> slice_p(n);
    for (std::size_t i = 0; i < n; ++i) {
      etas_p[i] = inst.etas[perm[i]];
      slice_p[i] = inst.slice_of[perm[i]];
    }
    const SlotSchedule a =
        schedule_slot(inst.alloc, inst.etas, inst.slice_of, inst.n_slices);
    const SlotSchedule b =
        schedule_slot(inst.alloc, etas_p, slice_p, inst.n_slices);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(b.y_ded[i] - a.y_ded[perm[i]]));
      worst = std::max(worst, std::abs(b.y_sh[i] - a.y_sh[perm[i]]));
    }
  }
  return make_result("permutation_equivariance", worst <= 1e-9,
                     "max schedule gap " + fmt(worst));
}

CheckResult check_coordinate_monotonicity(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x4D, 0, 0));
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const SlotInstance inst = random_slot_instance(rng);
    const SlotSchedule base =
        schedule_slot(inst.alloc, inst.etas, inst.slice_of, inst.n_slices);

    Allocation bumped = inst.alloc;
    const int comp = rand_int(rng, 0, inst.n_slices);
    const double delta = 0.25 + rng.uniform01() * 2.0;
    if (comp == inst.n_slices)
      bumped.x_sh += delta;
    else
      bumped.x_ded[comp] += delta;

    const SlotSchedule more =
        schedule_slot(bumped, inst.etas, inst.slice_of, inst.n_slices);
    for (std::size_t i = 0; i < inst.etas.size(); ++i)
      worst = std::max(worst, base.total_prbs(static_cast<int>(i)) -
                                  more.total_prbs(static_cast<int>(i)));
  }
  return make_result("coordinate_monotonicity", worst <= 1e-9,
                     "max per-ue decrease " + fmt(worst));
}

CheckResult check_queue_conservation(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x51, 0, 0));
  double worst = 0.0, worst_capacity = 0.0, worst_negative = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Scenario sc = random_tiny_scenario(rng, 2, 4, 3, 5);
    const SampleSet samples = build_sample_set(sc, rng.next());
    Allocation alloc;
    alloc.x_ded.resize(samples.n_slices);
    for (auto& x : alloc.x_ded) x = rng.uniform01() * 6.0;
    alloc.x_sh = rng.uniform01() * 6.0;

    const SimResult sim = simulate(alloc, samples);
    SlotSolver solver(samples.slice_of, samples.n_slices);
    SlotSchedule schedule;
    for (int i = 0; i < samples.n_ues; ++i)
      for (int k = 0; k < samples.samples; ++k) {
        double served = 0.0, arrived = 0.0;
        for (int t = 0; t < samples.slots; ++t) {
          const std::size_t idx = sim.queues.idx(i, k, t);
          served += sim.queues.served[idx];
          arrived += samples.arrival(i, k, t);
          worst_negative =
              std::max(worst_negative, -sim.queues.backlog[idx]);
          solver.solve(alloc, samples.eta_at(k, t), schedule);
          const double cap = kSymbolsPerPrb * samples.se(i, k, t) *
                             schedule.total_prbs(i);
          worst_capacity =
              std::max(worst_capacity, sim.queues.served[idx] - cap);
        }
        const double final_backlog =
            sim.queues.backlog[sim.queues.idx(i, k, samples.slots - 1)];
        const double scale = std::max(1.0, arrived);
        worst = std::max(worst,
                         std::abs(served + final_backlog - arrived) / scale);
      }
  }
  const bool pass =
      worst <= 1e-9 && worst_capacity <= 1e-9 && worst_negative <= 0.0;
  return make_result("queue_conservation", pass,
                     "flow error " + fmt(worst) + ", capacity excess " +
                         fmt(worst_capacity) + ", negativity " +
                         fmt(worst_negative));
}

CheckResult check_delay_monotonicity(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x44, 0, 0));
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Scenario sc = random_tiny_scenario(rng, 2, 4, 3, 6);
    const SampleSet samples = build_sample_set(sc, rng.next());
    Allocation alloc;
    alloc.x_ded.resize(samples.n_slices);
    for (auto& x : alloc.x_ded) x = rng.uniform01() * 4.0;
    alloc.x_sh = rng.uniform01() * 4.0;

    Allocation bumped = alloc;
    const int comp = rand_int(rng, 0, samples.n_slices);
    if (comp == samples.n_slices)
      bumped.x_sh += 0.5 + rng.uniform01() * 2.0;
    else
      bumped.x_ded[comp] += 0.5 + rng.uniform01() * 2.0;

    const SimResult before = simulate(alloc, samples);
    const SimResult after = simulate(bumped, samples);
    for (int i = 0; i < samples.n_ues; ++i)
      worst = std::max(worst, after.delays.mean_delay[i] -
                                  before.delays.mean_delay[i]);
  }
  return make_result("delay_monotonicity", worst <= 1e-8,
                     "max delay increase " + fmt(worst));
}

CheckResult check_pareto_tail_recovery(std::uint64_t seed) {
  double worst = 0.0;
  for (const double alpha : {1.05, 1.5, 1.95}) {
    Xoshiro256pp rng(derive_seed(seed, 0x48, static_cast<std::uint64_t>(alpha * 100), 0));
    const ParetoSpec spec{alpha, 1200.0};
    const std::vector<double> draws = pareto_sample(spec, rng, 200000);
    const double estimate = hill_tail_index(draws, 2000);
    worst = std::max(worst, std::abs(estimate - alpha));
  }
  return make_result("pareto_tail_recovery", worst <= 0.15,
                     "max |hill - alpha| = " + fmt(worst));
}

CheckResult check_se_autocorrelation(std::uint64_t seed) {
  SeSynthesisParams params =
      SeSynthesisParams::defaults_for(MobilityProfile::pedestrian);
  const SeTrace trace = synthesize_se(params, 1, 10000, seed, 0);
  std::vector<double> logs(trace.eta.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(trace.eta[i]);
  const double n = static_cast<double>(logs.size());
  double mean = 0.0;
  for (const double v : logs) mean += v;
  mean /= n;
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    var += (logs[i] - mean) * (logs[i] - mean);
    if (i + 1 < logs.size()) cov += (logs[i] - mean) * (logs[i + 1] - mean);
  }
  const double lag1 = cov / var;
  const double target = params.lag1_autocorr();
  return make_result("se_autocorrelation", std::abs(lag1 - target) <= 0.05,
                     "lag1 " + fmt(lag1) + " vs configured " + fmt(target));
}

CheckResult check_transform_equivalence_suite(int trials, std::uint64_t seed) {
  TransformCheckConfig config;
  config.trials = trials;
  config.seed = seed;
  const TransformCheckReport report = verify_transform_equivalence(config);
  return make_result("transform_equivalence", report.pass(),
                     std::to_string(report.trials) + " trials, max violation " +
                         fmt(report.max_violation));
}

CheckResult check_mip_consistency(int scenario_count, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x4C, 0, 0));
  double worst = 0.0, worst_headroom = 0.0;
  int checked = 0;
  for (int n = 0; n < scenario_count; ++n) {
    const Scenario sc = random_tiny_scenario(rng, 2, 4, 1, 3);
    const SampleSet samples = build_sample_set(sc, rng.next());
    const SlaSpec sla = sc.sla();
    for (const FormulationKind kind :
         {FormulationKind::hyra, FormulationKind::dedicated_only,
          FormulationKind::shared_only}) {
      SearchSpec search = sc.search;
      search.mode = kind;
      const OptResult opt = minimize_allocation(search, samples, sla);
      if (!opt.feasible) continue;
      MipBuildParams params = sc.mip;
      params.kind = kind;
      const MipModel model = build_mip(samples, sla, params);
      const Assignment lifted = lift_assignment(model, samples, opt.best);
      const ViolationReport report = check_solution(model, lifted);
      worst = std::max(worst, report.max_violation);
      worst_headroom = std::max(worst_headroom, big_m_headroom(model, lifted));
      ++checked;
    }
  }
  const bool pass = worst <= 1e-6 && worst_headroom < 0.99 && checked > 0;
  return make_result("mip_consistency", pass,
                     std::to_string(checked) + " lifts, max violation " +
                         fmt(worst) + ", big-M use " + fmt(worst_headroom));
}

CheckResult check_pruning_soundness(int trials, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0x53, 0, 0));
  int audited = 0, feasible_pruned = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const Scenario sc = random_tiny_scenario(rng, 2, 3, 2, 4);
    const SampleSet samples = build_sample_set(sc, rng.next());
    const SlaSpec sla = sc.sla();
    SearchSpec search = sc.search;
    search.mode = FormulationKind::hyra;
    const OptResult opt = minimize_allocation(search, samples, sla);
    if (opt.pruned_points.empty()) continue;
    // audit about 1%, at least a handful
    const std::size_t want = std::max<std::size_t>(
        5, opt.pruned_points.size() / 100);
    for (std::size_t j = 0; j < want && j < opt.pruned_points.size(); ++j) {
      const std::size_t pick = static_cast<std::size_t>(
          rng.uniform01() * static_cast<double>(opt.pruned_points.size()));
      const Allocation& alloc = opt.pruned_points[pick];
      const SimResult sim = simulate(alloc, samples);
      if (sla_satisfied(sim.delays, sla, samples.slice_of, samples.n_slices)
              .satisfied)
        ++feasible_pruned;
      ++audited;
    }
  }
  return make_result("pruning_soundness", feasible_pruned == 0,
                     std::to_string(audited) + " pruned points re-checked, " +
                         std::to_string(feasible_pruned) + " feasible");
}

CheckResult check_determinism(std::uint64_t seed) {
  Scenario sc;
  sc.slices.clear();
  for (int s = 0; s < 2; ++s) {
    SliceConfig slice;
    slice.ue_count = 2;
    slice.delay_budget_ms = s == 0 ? 3.0 : 8.0;
    slice.traffic.inter_arrival_ms = {1.5, 0.5};
    slice.traffic.packet_size_bits = {1.5, 1000.0};
    slice.traffic.target_load_bits_per_ms = 400.0;
    slice.channel.profile = "mixed";
    sc.slices.push_back(slice);
  }
  sc.samples = 3;
  sc.slots = 6;
  sc.seeds = {seed + 1, seed + 2};
  sc.search.x_max = 40.0;
  sc.mip.x_upper = 40.0;

  const auto read_file = [](const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
  };

  namespace fs = std::filesystem;
  const fs::path base =
      fs::temp_directory_path() / ("hyra_verify_" + std::to_string(seed));
  const fs::path dir_a = base / "a", dir_b = base / "b";
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  run_experiment(sc, dir_a.string());
  run_experiment(sc, dir_b.string());

  const bool same_summary =
      read_file(dir_a / "summary.csv") == read_file(dir_b / "summary.csv");
  const bool same_per_seed =
      read_file(dir_a / "per_seed.csv") == read_file(dir_b / "per_seed.csv");
  const bool nonempty = !read_file(dir_a / "summary.csv").empty();
  fs::remove_all(base);

  return make_result("determinism", same_summary && same_per_seed && nonempty,
                     std::string("summary ") + (same_summary ? "ok" : "DIFFERS") +
                         ", per_seed " + (same_per_seed ? "ok" : "DIFFERS"));
}

std::vector<CheckResult> run_verification(int trials, std::uint64_t seed) {
  std::vector<CheckResult> results;
  results.push_back(check_kernel_equivalence(seed));
  results.push_back(check_scheduler_kkt(trials, seed));
  results.push_back(check_budget_exactness(trials, seed));
  results.push_back(check_within_slice_leveling(trials, seed));
  results.push_back(check_permutation_equivariance(trials, seed));
  results.push_back(check_coordinate_monotonicity(trials, seed));
  results.push_back(check_queue_conservation(std::max(10, trials / 10), seed));
  results.push_back(check_delay_monotonicity(std::max(20, trials / 5), seed));
  results.push_back(check_pareto_tail_recovery(seed));
  results.push_back(check_se_autocorrelation(seed));
  results.push_back(check_transform_equivalence_suite(trials, seed));
  results.push_back(check_mip_consistency(20, seed));
  results.push_back(check_pruning_soundness(5, seed));
  results.push_back(check_determinism(seed));
  return results;
}

bool all_passed(std::span<const CheckResult> results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

void print_check_results(std::ostream& os,
                         std::span<const CheckResult> results) {
  for (const auto& r : results)
    os << (r.pass ? "[ ok ] " : "[FAIL] ") << r.name << " (" << r.detail
       << ")\n";
}

}  // namespace hyra
