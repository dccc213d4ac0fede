#include "hyra/channel.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hyra/rng.hpp"

namespace hyra {

double bits_per_prb(double eta) {
  if (!(eta > 0.0))
    throw std::invalid_argument("bits_per_prb: eta must be positive");
  return kSymbolsPerPrb * eta;
}

MobilityProfile mobility_profile_from_string(const std::string& name) {
  if (name == "pedestrian") return MobilityProfile::pedestrian;
  if (name == "vehicular") return MobilityProfile::vehicular;
  if (name == "urban") return MobilityProfile::urban;
  throw std::invalid_argument("unknown mobility profile: " + name);
}

const char* to_string(MobilityProfile p) {
  switch (p) {
    case MobilityProfile::pedestrian:
      return "pedestrian";
    case MobilityProfile::vehicular:
      return "vehicular";
    case MobilityProfile::urban:
      return "urban";
  }
  return "?";
}

SeSynthesisParams SeSynthesisParams::defaults_for(MobilityProfile p) {
  SeSynthesisParams params;
  params.profile = p;
  switch (p) {
    case MobilityProfile::pedestrian:
      params.mean_se = 4.0;
      params.sigma_log = 0.25;
      params.half_life_slots = 25.0;
      break;
    case MobilityProfile::vehicular:
      params.mean_se = 3.0;
      params.sigma_log = 0.45;
      params.half_life_slots = 2.5;
      break;
    case MobilityProfile::urban:
      params.mean_se = 3.5;
      params.sigma_log = 0.35;
      params.half_life_slots = 8.0;
      break;
  }
  return params;
}

void SeSynthesisParams::validate() const {
  if (!(mean_se > 0.0) || !(mean_se <= eta_max))
    throw std::invalid_argument("SeSynthesisParams: mean_se must be in (0, eta_max]");
  if (sigma_log < 0.0)
    throw std::invalid_argument("SeSynthesisParams: sigma_log must be >= 0");
  if (!(half_life_slots > 0.0))
    throw std::invalid_argument("SeSynthesisParams: half_life_slots must be > 0");
  if (!(eta_max > 0.0))
    throw std::invalid_argument("SeSynthesisParams: eta_max must be > 0");
}

double SeSynthesisParams::lag1_autocorr() const {
  return std::exp2(-1.0 / half_life_slots);
}

SeTrace synthesize_se(const SeSynthesisParams& params, int samples, int slots,
                      std::uint64_t master_seed, std::uint64_t global_ue_id) {
  params.validate();
  if (samples < 1 || slots < 1)
    throw std::invalid_argument("synthesize_se: K and T must be >= 1");

  SeTrace trace;
  trace.samples = samples;
  trace.slots = slots;
  trace.profile = params.profile;
  trace.eta.assign(static_cast<std::size_t>(samples) * slots, 0.0);

  const double rho = params.lag1_autocorr();
  const double innovation = params.sigma_log * std::sqrt(1.0 - rho * rho);
  const double m = std::log(params.mean_se);

  for (int k = 0; k < samples; ++k) {
    Xoshiro256pp rng(derive_seed(master_seed, kStreamChannel, global_ue_id,
                                 static_cast<std::uint64_t>(k)));
    double dev = params.sigma_log * rng.normal01();  // stationary start
    for (int t = 0; t < slots; ++t) {
      if (t > 0) dev = rho * dev + innovation * rng.normal01();
      trace.at(k, t) = std::min(std::exp(m + dev), params.eta_max);
    }
  }
  return trace;
}

void write_se_csv(std::ostream& os, const std::vector<SeTrace>& traces) {
  os << "ue_id,k,t,eta\n";
  char buf[64];
  for (std::size_t u = 0; u < traces.size(); ++u) {
    const SeTrace& tr = traces[u];
    for (int k = 0; k < tr.samples; ++k)
      for (int t = 0; t < tr.slots; ++t) {
        std::snprintf(buf, sizeof(buf), "%.17g", tr.at(k, t));
        os << u << ',' << k << ',' << t << ',' << buf << '\n';
      }
  }
}

std::vector<SeTrace> read_se_csv(std::istream& is, int ue_count, int samples,
                                 int slots, double eta_max) {
  std::vector<SeTrace> traces(ue_count);
  std::vector<std::vector<char>> seen(ue_count);
  for (auto& tr : traces) {
    tr.samples = samples;
    tr.slots = slots;
    tr.eta.assign(static_cast<std::size_t>(samples) * slots, 0.0);
  }
  for (auto& s : seen)
    s.assign(static_cast<std::size_t>(samples) * slots, 0);

  std::string line;
  if (!std::getline(is, line) || line.rfind("ue_id,k,t,eta", 0) != 0)
    throw std::runtime_error("SE CSV: missing header `ue_id,k,t,eta`");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long u, k, t;
    double eta;
    char c1, c2, c3;
    if (!(row >> u >> c1 >> k >> c2 >> t >> c3 >> eta) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw std::runtime_error("SE CSV: malformed line " +
                               std::to_string(lineno));
    if (u < 0 || u >= ue_count || k < 0 || k >= samples || t < 0 || t >= slots)
      throw std::runtime_error("SE CSV: index out of range at line " +
                               std::to_string(lineno));
    if (!(eta > 0.0) || eta > eta_max)
      throw std::runtime_error("SE CSV: eta out of (0, eta_max] at line " +
                               std::to_string(lineno));
    traces[u].at(static_cast<int>(k), static_cast<int>(t)) = eta;
    seen[u][static_cast<std::size_t>(k) * slots + t] = 1;
  }
  for (int u = 0; u < ue_count; ++u)
    for (int k = 0; k < samples; ++k)
      for (int t = 0; t < slots; ++t)
        if (!seen[u][static_cast<std::size_t>(k) * slots + t])
          throw std::runtime_error("SE CSV: missing cell (ue=" +
                                   std::to_string(u) + ",k=" +
                                   std::to_string(k) + ",t=" +
                                   std::to_string(t) + ")");
  return traces;
}

std::vector<SeTrace> load_se_traces(const std::string& path, int ue_count,
                                    int samples, int slots, double eta_max) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open SE trace file: " + path);
  return read_se_csv(is, ue_count, samples, slots, eta_max);
}

}  // namespace hyra
