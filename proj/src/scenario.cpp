#include "hyra/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hyra {

using nlohmann::json;

int Scenario::total_ues() const {
  int n = 0;
  for (const auto& s : slices) n += s.ue_count;
  return n;
}

std::vector<int> Scenario::slice_map() const {
  std::vector<int> map;
  map.reserve(total_ues());
  for (std::size_t s = 0; s < slices.size(); ++s)
    for (int u = 0; u < slices[s].ue_count; ++u)
      map.push_back(static_cast<int>(s));
  return map;
}

SlaSpec Scenario::sla() const {
  SlaSpec spec;
  spec.mode = sla_mode;
  for (const auto& s : slices) spec.slice_budget_ms.push_back(s.delay_budget_ms);
  return spec;
}

void Scenario::validate() const {
  if (slices.empty())
    throw std::invalid_argument("scenario: need at least one slice");
  if (slots < 1 || samples < 1)
    throw std::invalid_argument("scenario: T and K must be >= 1");
  if (!(eta_max > 0.0))
    throw std::invalid_argument("scenario: eta_max must be positive");
  if (seeds.empty())
    throw std::invalid_argument("scenario: need at least one seed");
  for (std::size_t s = 0; s < slices.size(); ++s) {
    if (slices[s].ue_count < 1)
      throw std::invalid_argument("scenario: slices[" + std::to_string(s) +
                                  "] has no UEs");
    if (!(slices[s].delay_budget_ms > 0.0))
      throw std::invalid_argument("scenario: slices[" + std::to_string(s) +
                                  "] delay budget must be positive");
    slices[s].traffic.validate();
  }
  search.validate();
}

namespace {

[[noreturn]] void config_error(const std::string& path,
                               const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

template <typename T>
T field(const json& j, const std::string& path, const std::string& key,
        const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(path + "." + key, e.what());
  }
}

template <typename T>
T require_field(const json& j, const std::string& path,
                const std::string& key) {
  if (!j.contains(key)) config_error(path + "." + key, "missing field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(path + "." + key, e.what());
  }
}

TrafficSpec parse_traffic(const json& j, const std::string& path) {
  TrafficSpec spec;
  spec.inter_arrival_ms.alpha = field(j, path, "alpha", 1.5);
  spec.inter_arrival_ms.alpha =
      field(j, path, "alpha_inter_arrival", spec.inter_arrival_ms.alpha);
  spec.packet_size_bits.alpha = field(j, path, "alpha", 1.5);
  spec.packet_size_bits.alpha =
      field(j, path, "alpha_packet_size", spec.packet_size_bits.alpha);
  spec.inter_arrival_ms.scale = field(j, path, "inter_arrival_scale_ms", 0.5);
  spec.packet_size_bits.scale =
      field(j, path, "packet_size_scale_bits", 4000.0);
  if (j.contains("target_load_bits_per_ms"))
    spec.target_load_bits_per_ms =
        require_field<double>(j, path, "target_load_bits_per_ms");
  try {
    spec.validate();
  } catch (const std::exception& e) {
    config_error(path, e.what());
  }
  return spec;
}

ChannelConfig parse_channel(const json& j, const std::string& path) {
  ChannelConfig cfg;
  cfg.trace_path = field<std::string>(j, path, "trace_path", "");
  cfg.profile = field<std::string>(j, path, "profile", "mixed");
  if (cfg.trace_path.empty() && cfg.profile != "mixed") {
    try {
      mobility_profile_from_string(cfg.profile);
    } catch (const std::exception& e) {
      config_error(path + ".profile", e.what());
    }
  }
  if (j.contains("mean_se"))
    cfg.mean_se = require_field<double>(j, path, "mean_se");
  if (j.contains("sigma_log"))
    cfg.sigma_log = require_field<double>(j, path, "sigma_log");
  if (j.contains("half_life_slots"))
    cfg.half_life_slots = require_field<double>(j, path, "half_life_slots");
  return cfg;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") +
                                e.what());
  }

  Scenario sc;
  sc.slots = field(j, "", "T", 20);
  sc.samples = field(j, "", "K", 20);
  sc.eta_max = field(j, "", "eta_max", kDefaultEtaMax);
  const std::string mode = field<std::string>(j, "", "sla_mode", "per_ue");
  try {
    sc.sla_mode = sla_mode_from_string(mode);
  } catch (const std::exception& e) {
    config_error("sla_mode", e.what());
  }
  sc.seeds = field(j, "", "seeds", sc.seeds);

  if (!j.contains("slices") || !j.at("slices").is_array() ||
      j.at("slices").empty())
    config_error("slices", "need a non-empty array of slices");
  sc.slices.clear();
  int index = 0;
  for (const auto& js : j.at("slices")) {
    const std::string path = "slices[" + std::to_string(index++) + "]";
    SliceConfig slice;
    slice.ue_count = require_field<int>(js, path, "ue_count");
    slice.delay_budget_ms = require_field<double>(js, path, "delay_budget_ms");
    if (js.contains("traffic"))
      slice.traffic = parse_traffic(js.at("traffic"), path + ".traffic");
    else
      config_error(path + ".traffic", "missing field");
    if (js.contains("channel"))
      slice.channel = parse_channel(js.at("channel"), path + ".channel");
    sc.slices.push_back(std::move(slice));
  }

  if (j.contains("search")) {
    const json& js = j.at("search");
    sc.search.grid_step = field(js, "search", "grid_step", 1.0);
    sc.search.x_max = field(js, "search", "x_max", 100.0);
    sc.search.refinement_rounds = field(js, "search", "refinement_rounds", 2);
  }
  if (j.contains("mip")) {
    const json& js = j.at("mip");
    sc.mip.big_m = field(js, "mip", "big_m", 0.0);
    sc.mip.epsilon = field(js, "mip", "epsilon", 1e-6);
    sc.mip.x_upper = field(js, "mip", "x_upper", sc.search.x_max);
  } else {
    sc.mip.x_upper = sc.search.x_max;
  }

  try {
    sc.validate();
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return scenario_from_json_text(buf.str());
}

std::string scenario_to_config_json(const Scenario& scenario) {
  json j;
  j["T"] = scenario.slots;
  j["K"] = scenario.samples;
  j["eta_max"] = scenario.eta_max;
  j["sla_mode"] = to_string(scenario.sla_mode);
  j["seeds"] = scenario.seeds;
  j["slices"] = json::array();
  for (const auto& s : scenario.slices) {
    json js;
    js["ue_count"] = s.ue_count;
    js["delay_budget_ms"] = s.delay_budget_ms;
    json jt;
    jt["alpha_inter_arrival"] = s.traffic.inter_arrival_ms.alpha;
    jt["alpha_packet_size"] = s.traffic.packet_size_bits.alpha;
    jt["inter_arrival_scale_ms"] = s.traffic.inter_arrival_ms.scale;
    jt["packet_size_scale_bits"] = s.traffic.packet_size_bits.scale;
    if (s.traffic.target_load_bits_per_ms)
      jt["target_load_bits_per_ms"] = *s.traffic.target_load_bits_per_ms;
    js["traffic"] = jt;
    json jc;
    if (!s.channel.trace_path.empty()) jc["trace_path"] = s.channel.trace_path;
    jc["profile"] = s.channel.profile;
    if (s.channel.mean_se) jc["mean_se"] = *s.channel.mean_se;
    if (s.channel.sigma_log) jc["sigma_log"] = *s.channel.sigma_log;
    if (s.channel.half_life_slots)
      jc["half_life_slots"] = *s.channel.half_life_slots;
    js["channel"] = jc;
    j["slices"].push_back(js);
  }
  j["search"] = {{"grid_step", scenario.search.grid_step},
                 {"x_max", scenario.search.x_max},
                 {"refinement_rounds", scenario.search.refinement_rounds}};
  j["mip"] = {{"big_m", scenario.mip.big_m},
              {"epsilon", scenario.mip.epsilon},
              {"x_upper", scenario.mip.x_upper}};
  return j.dump(2) + "\n";
}

SampleSet build_sample_set(const Scenario& scenario,
                           std::uint64_t master_seed) {
  scenario.validate();
  const int n = scenario.total_ues();
  const std::vector<int> slice_of = scenario.slice_map();

  std::vector<ArrivalTrace> arrivals;
  std::vector<SeTrace> channels;
  arrivals.reserve(n);
  channels.reserve(n);

  static constexpr MobilityProfile kMixedOrder[3] = {
      MobilityProfile::pedestrian, MobilityProfile::vehicular,
      MobilityProfile::urban};

  int global_ue = 0;
  for (const auto& slice : scenario.slices) {
    std::vector<SeTrace> from_file;
    if (!slice.channel.trace_path.empty())
      from_file = load_se_traces(slice.channel.trace_path, slice.ue_count,
                                 scenario.samples, scenario.slots,
                                 scenario.eta_max);
    for (int u = 0; u < slice.ue_count; ++u, ++global_ue) {
      arrivals.push_back(generate_arrival_trace(
          slice.traffic, scenario.samples, scenario.slots, master_seed,
          static_cast<std::uint64_t>(global_ue)));
      if (!from_file.empty()) {
        channels.push_back(from_file[u]);
        continue;
      }
      const MobilityProfile profile =
          slice.channel.profile == "mixed"
              ? kMixedOrder[global_ue % 3]
              : mobility_profile_from_string(slice.channel.profile);
      SeSynthesisParams params = SeSynthesisParams::defaults_for(profile);
      params.eta_max = scenario.eta_max;
      if (slice.channel.mean_se) params.mean_se = *slice.channel.mean_se;
      if (slice.channel.sigma_log) params.sigma_log = *slice.channel.sigma_log;
      if (slice.channel.half_life_slots)
        params.half_life_slots = *slice.channel.half_life_slots;
      channels.push_back(synthesize_se(params, scenario.samples,
                                       scenario.slots, master_seed,
                                       static_cast<std::uint64_t>(global_ue)));
    }
  }

  return SampleSet::assemble(arrivals, channels, slice_of,
                             static_cast<int>(scenario.slices.size()));
}

namespace {

double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

ModeSummary summarize(const std::string& mode,
                      const std::vector<double>& totals, int feasible_runs) {
  ModeSummary s;
  s.mode = mode;
  s.feasible_runs = feasible_runs;
  double acc = 0.0;
  for (const double t : totals) acc += t;
  s.total_mean = totals.empty() ? 0.0 : acc / static_cast<double>(totals.size());
  if (!totals.empty()) {
    s.total_iqr_low = percentile(totals, 0.25);
    s.total_iqr_high = percentile(totals, 0.75);
  }
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const Scenario& scenario,
                                const std::string& out_dir) {
  scenario.validate();
  ExperimentResult result;

  const SlaSpec sla = scenario.sla();
  for (const std::uint64_t seed : scenario.seeds) {
    const SampleSet samples = build_sample_set(scenario, seed);
    ExperimentRow row;
    row.seed = seed;
    row.comparison = compare_strategies(samples, sla, scenario.search);
    result.rows.push_back(std::move(row));
  }

  std::vector<double> hyra_totals, ded_totals, sh_totals, savings;
  int hyra_ok = 0, ded_ok = 0, sh_ok = 0;
  for (const auto& row : result.rows) {
    hyra_totals.push_back(row.comparison.hyra.total);
    ded_totals.push_back(row.comparison.dedicated.total);
    sh_totals.push_back(row.comparison.shared.total);
    savings.push_back(row.comparison.savings_vs_baseline_mean);
    hyra_ok += row.comparison.hyra.feasible ? 1 : 0;
    ded_ok += row.comparison.dedicated.feasible ? 1 : 0;
    sh_ok += row.comparison.shared.feasible ? 1 : 0;
  }
  result.summary.push_back(summarize("hyra", hyra_totals, hyra_ok));
  result.summary.push_back(summarize("dedicated_only", ded_totals, ded_ok));
  result.summary.push_back(summarize("shared_only", sh_totals, sh_ok));
  double acc = 0.0;
  for (const double s : savings) acc += s;
  result.savings_mean =
      savings.empty() ? 0.0 : acc / static_cast<double>(savings.size());

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const int S = static_cast<int>(scenario.slices.size());
    {
      std::ofstream os(out_dir + "/per_seed.csv", std::ios::binary);
      write_per_seed_csv(os, result, S);
    }
    {
      std::ofstream os(out_dir + "/summary.csv", std::ios::binary);
      write_summary_csv(os, result);
    }
    {
      std::ofstream os(out_dir + "/config_resolved.json", std::ios::binary);
      os << scenario_to_config_json(scenario);
    }
  }
  return result;
}

namespace {

void per_seed_row(std::ostream& os, std::uint64_t seed, const char* mode,
                  const OptResult& r, int n_slices) {
  os << seed << ',' << mode;
  for (int s = 0; s < n_slices; ++s) os << ',' << fmt(r.best.x_ded[s]);
  os << ',' << fmt(r.best.x_sh) << ',' << fmt(r.total) << ','
     << (r.feasible ? 1 : 0) << ',' << r.evaluations << '\n';
}

}  // namespace

void write_per_seed_csv(std::ostream& os, const ExperimentResult& result,
                        int n_slices) {
  os << "seed,mode";
  for (int s = 1; s <= n_slices; ++s) os << ",x_ded_" << s;
  os << ",x_sh,total,feasible,evals\n";
  for (const auto& row : result.rows) {
    per_seed_row(os, row.seed, "hyra", row.comparison.hyra, n_slices);
    per_seed_row(os, row.seed, "dedicated_only", row.comparison.dedicated,
                 n_slices);
    per_seed_row(os, row.seed, "shared_only", row.comparison.shared, n_slices);
  }
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  os << "mode,total_mean,total_iqr_low,total_iqr_high,feasible_runs,"
        "savings_vs_baseline_mean\n";
  for (const auto& s : result.summary) {
    os << s.mode << ',' << fmt(s.total_mean) << ',' << fmt(s.total_iqr_low)
       << ',' << fmt(s.total_iqr_high) << ',' << s.feasible_runs << ',';
    if (s.mode == "hyra") os << fmt(result.savings_mean);
    os << '\n';
  }
}

std::vector<SweepRow> burstiness_sweep(const Scenario& scenario,
                                       std::span<const double> alphas) {
  scenario.validate();
  for (const double alpha : alphas)
    if (!(alpha > 1.0) || alpha > 2.5)
      throw std::invalid_argument("burstiness_sweep: alphas must be in (1, 2.5]");

  std::vector<SweepRow> rows;
  for (const double alpha : alphas) {
    Scenario variant = scenario;
    for (auto& slice : variant.slices) {
      TrafficSpec& traffic = slice.traffic;
      // keep the mean gap and the target load; vary only the tail index
      const double mean_gap = traffic.inter_arrival_ms.mean();
      traffic.inter_arrival_ms.alpha = alpha;
      traffic.inter_arrival_ms.scale = mean_gap * (alpha - 1.0) / alpha;
      traffic.packet_size_bits.alpha = alpha;
      if (!traffic.target_load_bits_per_ms)
        traffic.target_load_bits_per_ms = traffic.mean_load_bits_per_ms();
    }
    const SlaSpec sla = variant.sla();
    for (const std::uint64_t seed : variant.seeds) {
      SweepRow row;
      row.alpha = alpha;
      row.seed = seed;
      row.comparison = compare_strategies(build_sample_set(variant, seed), sla,
                                          variant.search);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows,
                     int n_slices) {
  os << "alpha,seed,mode";
  for (int s = 1; s <= n_slices; ++s) os << ",x_ded_" << s;
  os << ",x_sh,total,feasible,evals,savings\n";
  for (const auto& row : rows) {
    const auto emit = [&](const char* mode, const OptResult& r) {
      os << fmt(row.alpha) << ',' << row.seed << ',' << mode;
      for (int s = 0; s < n_slices; ++s) os << ',' << fmt(r.best.x_ded[s]);
      os << ',' << fmt(r.best.x_sh) << ',' << fmt(r.total) << ','
         << (r.feasible ? 1 : 0) << ',' << r.evaluations << ','
         << fmt(row.comparison.savings_vs_baseline_mean) << '\n';
    };
    emit("hyra", row.comparison.hyra);
    emit("dedicated_only", row.comparison.dedicated);
    emit("shared_only", row.comparison.shared);
  }
}

double sweep_mean_savings(std::span<const SweepRow> rows, double alpha) {
  double acc = 0.0;
  int count = 0;
  for (const auto& row : rows)
    if (row.alpha == alpha) {
      acc += row.comparison.savings_vs_baseline_mean;
      ++count;
    }
  return count > 0 ? acc / count : 0.0;
}

}  // namespace hyra
