#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyra/optimizer.hpp"
#include "hyra/queue_sim.hpp"
#include "hyra/sample_set.hpp"

namespace hyra {

// Channel source for one slice: a trace file, or synthesis parameters.
// Profile "mixed" cycles pedestrian/vehicular/urban over the slice's UEs by
// global UE index.
struct ChannelConfig {
  std::string trace_path;        // empty: synthesize
  std::string profile = "mixed";
  std::optional<double> mean_se;
  std::optional<double> sigma_log;
  std::optional<double> half_life_slots;
};

struct SliceConfig {
  int ue_count = 6;
  double delay_budget_ms = 3.0;
  TrafficSpec traffic;
  ChannelConfig channel;
};

// Full experiment description; defaults follow the desk-scale setup
// (T = 20 ms window, K = 20 samples).
struct Scenario {
  std::vector<SliceConfig> slices;
  int slots = 20;    // T
  int samples = 20;  // K
  SlaSpec::Mode sla_mode = SlaSpec::Mode::per_ue;
  double eta_max = kDefaultEtaMax;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  SearchSpec search;
  MipBuildParams mip;

  int total_ues() const;
  std::vector<int> slice_map() const;
  SlaSpec sla() const;
  void validate() const;
};

// Parse/serialize the scenario config. Parse errors carry the field path
// (e.g. `slices[1].traffic.alpha`). to_config_json emits every field with
// defaults filled in, which doubles as the resolved config echo.
Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_config_json(const Scenario& scenario);

// Generates all traces for one master seed (deterministic, order-free).
SampleSet build_sample_set(const Scenario& scenario,
                           std::uint64_t master_seed);

// Per-seed three-way comparison plus mean/IQR aggregation. Writes
// summary.csv, per_seed.csv, and config_resolved.json under out_dir.
struct ExperimentRow {
  std::uint64_t seed = 0;
  StrategyComparison comparison;
};

struct ModeSummary {
  std::string mode;
  double total_mean = 0.0;
  double total_iqr_low = 0.0;
  double total_iqr_high = 0.0;
  int feasible_runs = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<ModeSummary> summary;  // hyra, dedicated_only, shared_only
  double savings_mean = 0.0;
};

ExperimentResult run_experiment(const Scenario& scenario,
                                const std::string& out_dir);

void write_per_seed_csv(std::ostream& os, const ExperimentResult& result,
                        int n_slices);
void write_summary_csv(std::ostream& os, const ExperimentResult& result);

// Re-runs the comparison with every slice's tail indices set to each alpha,
// holding the mean inter-arrival gap and the target load fixed so only
// burstiness varies.
struct SweepRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  StrategyComparison comparison;
};

std::vector<SweepRow> burstiness_sweep(const Scenario& scenario,
                                       std::span<const double> alphas);
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows,
                     int n_slices);
// Mean savings across seeds for one alpha of the sweep.
double sweep_mean_savings(std::span<const SweepRow> rows, double alpha);

}  // namespace hyra
