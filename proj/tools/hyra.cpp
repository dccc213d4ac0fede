// hyra command-line front end: trace generation, slot scheduling, queue
// simulation, outer-loop optimization, MIP export, and the verification
// suites, all driven by a JSON scenario config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyra/channel.hpp"
#include "hyra/kernels.hpp"
#include "hyra/mip.hpp"
#include "hyra/optimizer.hpp"
#include "hyra/queue_sim.hpp"
#include "hyra/scenario.hpp"
#include "hyra/selfcheck.hpp"
#include "hyra/traffic.hpp"

namespace {

using namespace hyra;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const double v : parse_double_list(text))
    values.push_back(static_cast<int>(v));
  return values;
}

struct CommonOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<double> grid_step;
  std::optional<double> big_m;
  std::optional<double> epsilon;
};

Scenario load_with_overrides(const CommonOptions& opts) {
  Scenario sc = load_scenario(opts.config_path);
  if (!opts.seeds.empty()) sc.seeds = opts.seeds;
  if (opts.seed) sc.seeds = {*opts.seed};
  if (opts.grid_step) sc.search.grid_step = *opts.grid_step;
  if (opts.big_m) sc.mip.big_m = *opts.big_m;
  if (opts.epsilon) sc.mip.epsilon = *opts.epsilon;
  return sc;
}

void print_schedule(const SlotSchedule& schedule,
                    const std::vector<double>& etas,
                    const std::vector<int>& slice_of) {
  std::printf("%4s %6s %10s %10s %10s %10s\n", "ue", "slice", "eta", "y_ded",
              "y_sh", "y_total");
  for (std::size_t i = 0; i < etas.size(); ++i)
    std::printf("%4zu %6d %10.4f %10.6f %10.6f %10.6f\n", i, slice_of[i],
                etas[i], schedule.y_ded[i], schedule.y_sh[i],
                schedule.y_ded[i] + schedule.y_sh[i]);
  for (std::size_t s = 0; s < schedule.beta.size(); ++s)
    std::printf("slice %zu: beta = %g, lambda = %g\n", s, schedule.beta[s],
                schedule.lambda[s]);
  std::printf("shared: nu = %g\n", schedule.nu);
  std::printf("utility = %.9f\n",
              slot_utility(etas, schedule.y_ded, schedule.y_sh));
}

int cmd_gen_traces(const CommonOptions& opts) {
  const Scenario sc = load_with_overrides(opts);
  const std::uint64_t seed = sc.seeds.front();
  const SampleSet samples = build_sample_set(sc, seed);

  // regenerate in per-UE trace form for the writers
  std::vector<ArrivalTrace> arrivals(samples.n_ues);
  std::vector<SeTrace> channels(samples.n_ues);
  for (int i = 0; i < samples.n_ues; ++i) {
    arrivals[i].samples = channels[i].samples = samples.samples;
    arrivals[i].slots = channels[i].slots = samples.slots;
    arrivals[i].bits.resize(static_cast<std::size_t>(samples.samples) *
                            samples.slots);
    channels[i].eta.resize(arrivals[i].bits.size());
    for (int k = 0; k < samples.samples; ++k)
      for (int t = 0; t < samples.slots; ++t) {
        arrivals[i].at(k, t) = samples.arrival(i, k, t);
        channels[i].at(k, t) = samples.se(i, k, t);
      }
  }

  std::filesystem::create_directories(opts.out);
  {
    std::ofstream os(opts.out + "/arrivals.csv", std::ios::binary);
    write_arrivals_csv(os, arrivals);
  }
  {
    std::ofstream os(opts.out + "/se.csv", std::ios::binary);
    write_se_csv(os, channels);
  }
  for (const auto& slice : sc.slices)
    if (slice.traffic.packet_size_bits.light_tailed() ||
        slice.traffic.inter_arrival_ms.light_tailed())
      std::puts("note: alpha > 2 configured; traffic is light-tailed");
  std::printf("wrote %s/arrivals.csv and %s/se.csv (seed %llu)\n",
              opts.out.c_str(), opts.out.c_str(),
              static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_schedule(const std::string& etas_text, const std::string& slice_text,
                 const std::string& x_ded_text, double x_sh) {
  const std::vector<double> etas = parse_double_list(etas_text);
  std::vector<int> slice_of = parse_int_list(slice_text);
  if (slice_of.empty()) slice_of.assign(etas.size(), 0);
  const std::vector<double> x_ded = parse_double_list(x_ded_text);

  Allocation alloc;
  alloc.x_ded = x_ded;
  alloc.x_sh = x_sh;
  const int n_slices =
      x_ded.empty() ? 1 : static_cast<int>(x_ded.size());
  if (alloc.x_ded.empty()) alloc.x_ded.assign(1, 0.0);

  const SlotSchedule schedule =
      schedule_slot(alloc, etas, slice_of, n_slices);
  print_schedule(schedule, etas, slice_of);
  const KktReport kkt =
      kkt_residuals(schedule, alloc, etas, slice_of, n_slices);
  std::printf("kkt residual = %.3g\n", kkt.max_residual());
  return 0;
}

int cmd_simulate(const CommonOptions& opts, const std::string& x_ded_text,
                 double x_sh) {
  const Scenario sc = load_with_overrides(opts);
  const SampleSet samples = build_sample_set(sc, sc.seeds.front());

  Allocation alloc;
  alloc.x_ded = parse_double_list(x_ded_text);
  if (alloc.x_ded.empty()) alloc.x_ded.assign(sc.slices.size(), 0.0);
  alloc.x_sh = x_sh;

  const SimResult sim = simulate(alloc, samples);
  const SlaCheck check = sla_satisfied(sim.delays, sc.sla(), samples.slice_of,
                                       samples.n_slices);
  if (!opts.out.empty()) {
    std::ofstream os(opts.out, std::ios::binary);
    write_delay_csv(os, sim.delays, samples.slice_of);
    std::printf("wrote %s\n", opts.out.c_str());
  } else {
    write_delay_csv(std::cout, sim.delays, samples.slice_of);
  }
  std::printf("sla %s, worst margin %.6f ms\n",
              check.satisfied ? "satisfied" : "violated", check.worst_margin);
  return check.satisfied ? 0 : 1;
}

int cmd_optimize(const CommonOptions& opts, const std::string& mode) {
  const Scenario sc = load_with_overrides(opts);
  const SampleSet samples = build_sample_set(sc, sc.seeds.front());
  const SlaSpec sla = sc.sla();

  if (mode == "all") {
    const StrategyComparison cmp =
        compare_strategies(samples, sla, sc.search);
    if (!opts.out.empty()) {
      std::ofstream os(opts.out, std::ios::binary);
      write_comparison_csv(os, cmp, samples.n_slices);
      std::printf("wrote %s\n", opts.out.c_str());
    } else {
      write_comparison_csv(std::cout, cmp, samples.n_slices);
    }
    std::printf("savings vs baseline mean = %.4f\n",
                cmp.savings_vs_baseline_mean);
    return 0;
  }

  SearchSpec search = sc.search;
  search.mode = formulation_from_string(mode);
  const OptResult result = minimize_allocation(search, samples, sla);
  std::printf("mode %s: total %.4f (relaxed %.4f), feasible %d, "
              "%ld evaluations, %ld pruned\n",
              mode.c_str(), result.total, result.total_relaxed,
              result.feasible ? 1 : 0, result.evaluations, result.pruned);
  std::printf("x_ded = [");
  for (std::size_t s = 0; s < result.best.x_ded.size(); ++s)
    std::printf("%s%.4f", s ? ", " : "", result.best.x_ded[s]);
  std::printf("], x_sh = %.4f\n", result.best.x_sh);
  return result.feasible ? 0 : 1;
}

int cmd_run(const CommonOptions& opts) {
  const Scenario sc = load_with_overrides(opts);
  const ExperimentResult result = run_experiment(sc, opts.out);
  for (const auto& s : result.summary)
    std::printf("%-15s mean total %.3f  iqr [%.3f, %.3f]  feasible %d/%zu\n",
                s.mode.c_str(), s.total_mean, s.total_iqr_low,
                s.total_iqr_high, s.feasible_runs, result.rows.size());
  std::printf("hyra savings vs baseline mean: %.4f\n", result.savings_mean);
  if (!opts.out.empty())
    std::printf("wrote %s/{summary.csv,per_seed.csv,config_resolved.json}\n",
                opts.out.c_str());
  return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::string& alphas_text) {
  const Scenario sc = load_with_overrides(opts);
  const std::vector<double> alphas = parse_double_list(alphas_text);
  const std::vector<SweepRow> rows = burstiness_sweep(sc, alphas);
  if (!opts.out.empty()) {
    std::ofstream os(opts.out, std::ios::binary);
    write_sweep_csv(os, rows, static_cast<int>(sc.slices.size()));
    std::printf("wrote %s\n", opts.out.c_str());
  } else {
    write_sweep_csv(std::cout, rows, static_cast<int>(sc.slices.size()));
  }
  for (const double alpha : alphas)
    std::printf("alpha %.3f: mean savings %.4f\n", alpha,
                sweep_mean_savings(rows, alpha));
  return 0;
}

int cmd_export_mip(const CommonOptions& opts, const std::string& kind) {
  const Scenario sc = load_with_overrides(opts);
  const SampleSet samples = build_sample_set(sc, sc.seeds.front());
  MipBuildParams params = sc.mip;
  params.kind = formulation_from_string(kind);

  const MipModel model = build_mip(samples, sc.sla(), params);
  export_lp_file(model, opts.out);

  const LpCounts counts = parse_lp_counts_file(opts.out);
  const bool ok = counts.variables == model.vars.size() &&
                  counts.binaries == model.binary_count() &&
                  counts.constraints == model.rows.size();
  std::printf("wrote %s: %zu variables (%zu binary), %zu constraints, "
              "big_m %.6g, epsilon %.3g\n",
              opts.out.c_str(), model.vars.size(), model.binary_count(),
              model.rows.size(), model.big_m, model.epsilon);
  std::printf("re-parse check: %s\n", ok ? "ok" : "MISMATCH");
  return ok ? 0 : 1;
}

int cmd_verify(int trials, std::uint64_t seed) {
  std::printf("kernel backend: %s\n",
              std::string(kernels::backend_name(kernels::active_backend()))
                  .c_str());
  const std::vector<CheckResult> results = run_verification(trials, seed);
  print_check_results(std::cout, results);
  const bool ok = all_passed(results);
  std::printf("%s\n", ok ? "all checks passed" : "CHECKS FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HyRA hybrid RAN-slicing resource allocation"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string mode = "all";
  std::string kind = "hyra";
  std::string etas_text, slice_text, x_ded_text, alphas_text;
  double x_sh = 0.0;
  int trials = 200;
  std::uint64_t verify_seed = 7;
  std::string backend;

  app.add_option("--backend", backend,
                 "kernel backend override (scalar, avx2, neon)");

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt =
        cmd->add_option("--config", opts.config_path, "scenario config JSON");
    if (needs_config) opt->required();
    cmd->add_option("--out", opts.out, "output file or directory");
    cmd->add_option("--seed", opts.seed, "override: single master seed");
    cmd->add_option("--seeds", opts.seeds, "override: master seed list");
    cmd->add_option("--grid-step", opts.grid_step, "override: search grid step");
    cmd->add_option("--big-m", opts.big_m, "override: Big-M constant");
    cmd->add_option("--epsilon", opts.epsilon,
                    "override: strict-inequality slack");
  };

  auto* gen = app.add_subcommand("gen-traces",
                                 "generate arrival and SE traces as CSV");
  add_common(gen, true);
  gen->get_option("--out")->required();

  auto* schedule = app.add_subcommand(
      "schedule", "solve one slot and print the water-filling schedule");
  schedule->add_option("--etas", etas_text, "per-UE spectral efficiencies")
      ->required();
  schedule->add_option("--slice-of", slice_text,
                       "per-UE slice ids (default: all slice 0)");
  schedule->add_option("--x-ded", x_ded_text, "dedicated budgets per slice");
  schedule->add_option("--x-sh", x_sh, "shared budget");

  auto* simulate_cmd = app.add_subcommand(
      "simulate", "evaluate an allocation's delays on generated traces");
  add_common(simulate_cmd, true);
  simulate_cmd->add_option("--x-ded", x_ded_text, "dedicated budgets per slice");
  simulate_cmd->add_option("--x-sh", x_sh, "shared budget");

  auto* optimize = app.add_subcommand(
      "optimize", "search the minimal feasible allocation");
  add_common(optimize, true);
  optimize->add_option("--mode", mode,
                       "hyra, dedicated_only, shared_only, or all");

  auto* run = app.add_subcommand("run", "full multi-seed experiment");
  add_common(run, true);
  run->get_option("--out")->required();

  auto* sweep =
      app.add_subcommand("sweep", "burstiness sweep over tail indices");
  add_common(sweep, true);
  sweep->add_option("--alphas", alphas_text, "comma-separated tail indices")
      ->required();

  auto* export_mip =
      app.add_subcommand("export-mip", "write the single-level MIP as LP text");
  add_common(export_mip, true);
  export_mip->get_option("--out")->required();
  export_mip->add_option("--kind", kind,
                         "hyra, dedicated_only, or shared_only");

  auto* verify = app.add_subcommand(
      "verify", "run the property suites; nonzero exit on any failure");
  verify->add_option("--trials", trials, "instances per randomized suite");
  verify->add_option("--seed", verify_seed, "verification seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!backend.empty()) {
      if (backend == "scalar")
        kernels::force_backend(kernels::Backend::scalar);
      else if (backend == "avx2")
        kernels::force_backend(kernels::Backend::avx2);
      else if (backend == "neon")
        kernels::force_backend(kernels::Backend::neon);
      else
        throw std::invalid_argument("unknown backend: " + backend);
    }

    if (gen->parsed()) return cmd_gen_traces(opts);
    if (schedule->parsed())
      return cmd_schedule(etas_text, slice_text, x_ded_text, x_sh);
    if (simulate_cmd->parsed()) return cmd_simulate(opts, x_ded_text, x_sh);
    if (optimize->parsed()) return cmd_optimize(opts, mode);
    if (run->parsed()) return cmd_run(opts);
    if (sweep->parsed()) return cmd_sweep(opts, alphas_text);
    if (export_mip->parsed()) return cmd_export_mip(opts, kind);
    if (verify->parsed()) return cmd_verify(trials, verify_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
