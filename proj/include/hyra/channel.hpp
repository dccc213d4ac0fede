#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyra {

// 12 subcarriers x 14 OFDM symbols per PRB per 1 ms slot.
inline constexpr double kSymbolsPerPrb = 168.0;
// Top of the standard CQI/MCS spectral-efficiency table.
inline constexpr double kDefaultEtaMax = 7.4;

// Information bits one PRB carries at spectral efficiency eta (pre-ceiling).
// Throws std::invalid_argument on eta <= 0.
double bits_per_prb(double eta);

enum class MobilityProfile { pedestrian, vehicular, urban };

MobilityProfile mobility_profile_from_string(const std::string& name);
const char* to_string(MobilityProfile p);

// Stationary AR(1) in log-SE, mapped into (0, eta_max]. A stand-in for
// link-level fading traces: the half-life sets how fast channel quality
// decorrelates (pedestrian slowest, vehicular fastest) and sigma_log the
// swing. Means/variances here are configuration, not claims about any
// particular fading model.
struct SeSynthesisParams {
  MobilityProfile profile = MobilityProfile::pedestrian;
  double mean_se = 4.0;          // geometric mean of eta
  double sigma_log = 0.25;       // stddev of log eta
  double half_life_slots = 25.0; // lag at which autocorrelation halves
  double eta_max = kDefaultEtaMax;

  static SeSynthesisParams defaults_for(MobilityProfile p);
  void validate() const;
  double lag1_autocorr() const;  // rho = 2^(-1/half_life)
};

// Per-UE spectral-efficiency grid eta(k,t), K x T.
struct SeTrace {
  int samples = 0;
  int slots = 0;
  MobilityProfile profile = MobilityProfile::pedestrian;
  std::vector<double> eta;  // row-major [k][t]

  double& at(int k, int t) { return eta[static_cast<std::size_t>(k) * slots + t]; }
  double at(int k, int t) const { return eta[static_cast<std::size_t>(k) * slots + t]; }
};

SeTrace synthesize_se(const SeSynthesisParams& params, int samples, int slots,
                      std::uint64_t master_seed, std::uint64_t global_ue_id);

// CSV `ue_id,k,t,eta`. The grid must be complete: a missing cell is an
// error, since the channel is defined at every slot.
void write_se_csv(std::ostream& os, const std::vector<SeTrace>& traces);
std::vector<SeTrace> read_se_csv(std::istream& is, int ue_count, int samples,
                                 int slots, double eta_max = kDefaultEtaMax);
std::vector<SeTrace> load_se_traces(const std::string& path, int ue_count,
                                    int samples, int slots,
                                    double eta_max = kDefaultEtaMax);

}  // namespace hyra
