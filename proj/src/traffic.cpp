#include "hyra/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hyra {

void ParetoSpec::validate() const {
  if (!(alpha > 1.0))
    throw std::invalid_argument(
        "ParetoSpec: alpha must exceed 1 (alpha <= 1 has infinite mean)");
  if (!(scale > 0.0))
    throw std::invalid_argument("ParetoSpec: scale must be positive");
}

double ParetoSpec::mean() const { return alpha * scale / (alpha - 1.0); }

double pareto_draw(const ParetoSpec& spec, Xoshiro256pp& rng) {
  return spec.scale * std::pow(rng.uniform01(), -1.0 / spec.alpha);
}

std::vector<double> pareto_sample(const ParetoSpec& spec, Xoshiro256pp& rng,
                                  std::size_t n) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("pareto_sample: n must be >= 1");
  std::vector<double> out(n);
  for (auto& x : out) x = pareto_draw(spec, rng);
  return out;
}

void TrafficSpec::validate() const {
  inter_arrival_ms.validate();
  packet_size_bits.validate();
  if (target_load_bits_per_ms && !(*target_load_bits_per_ms > 0.0))
    throw std::invalid_argument("TrafficSpec: target load must be positive");
}

TrafficSpec TrafficSpec::resolved() const {
  validate();
  TrafficSpec r = *this;
  if (target_load_bits_per_ms) {
    // mean(size) = load * mean(gap)  =>  scale = load * mean(gap) * (a-1)/a
    const double mean_gap = inter_arrival_ms.mean();
    const double a = packet_size_bits.alpha;
    r.packet_size_bits.scale =
        *target_load_bits_per_ms * mean_gap * (a - 1.0) / a;
    r.packet_size_bits.validate();
  }
  return r;
}

double TrafficSpec::mean_load_bits_per_ms() const {
  const TrafficSpec r = resolved();
  return r.packet_size_bits.mean() / r.inter_arrival_ms.mean();
}

ArrivalTrace generate_arrival_trace(const TrafficSpec& spec, int samples,
                                    int slots, std::uint64_t master_seed,
                                    std::uint64_t global_ue_id) {
  if (samples < 1 || slots < 1)
    throw std::invalid_argument("generate_arrival_trace: K and T must be >= 1");
  const TrafficSpec r = spec.resolved();

  ArrivalTrace trace;
  trace.samples = samples;
  trace.slots = slots;
  trace.bits.assign(static_cast<std::size_t>(samples) * slots, 0.0);

  for (int k = 0; k < samples; ++k) {
    Xoshiro256pp rng(derive_seed(master_seed, kStreamArrivals, global_ue_id,
                                 static_cast<std::uint64_t>(k)));
    double tau = 0.0;
    for (;;) {
      tau += pareto_draw(r.inter_arrival_ms, rng);
      if (!(tau < static_cast<double>(slots))) break;
      const double size = pareto_draw(r.packet_size_bits, rng);
      const double bits = std::max(1.0, std::round(size));
      trace.at(k, static_cast<int>(tau)) += bits;
    }
  }
  return trace;
}

std::vector<ArrivalTrace> generate_arrivals(const TrafficSpec& spec,
                                            int ue_count, int samples,
                                            int slots,
                                            std::uint64_t master_seed,
                                            std::uint64_t first_ue_id) {
  if (ue_count < 1)
    throw std::invalid_argument("generate_arrivals: ue_count must be >= 1");
  std::vector<ArrivalTrace> traces;
  traces.reserve(ue_count);
  for (int u = 0; u < ue_count; ++u)
    traces.push_back(generate_arrival_trace(spec, samples, slots, master_seed,
                                            first_ue_id + u));
  return traces;
}

double hill_tail_index(std::span<const double> samples, std::size_t k_top) {
  if (k_top < 1 || samples.size() <= k_top)
    throw std::invalid_argument("hill_tail_index: need more samples than k_top");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double log_ref = std::log(sorted[k_top]);  // (k_top+1)-th largest
  double acc = 0.0;
  for (std::size_t j = 0; j < k_top; ++j) acc += std::log(sorted[j]) - log_ref;
  return static_cast<double>(k_top) / acc;
}

void write_arrivals_csv(std::ostream& os,
                        std::span<const ArrivalTrace> traces) {
  os << "ue_id,k,t,bits\n";
  for (std::size_t u = 0; u < traces.size(); ++u) {
    const ArrivalTrace& tr = traces[u];
    for (int k = 0; k < tr.samples; ++k)
      for (int t = 0; t < tr.slots; ++t)
        if (tr.at(k, t) != 0.0)
          os << u << ',' << k << ',' << t << ','
             << static_cast<long long>(tr.at(k, t)) << '\n';
  }
}

std::vector<ArrivalTrace> read_arrivals_csv(std::istream& is, int ue_count,
                                            int samples, int slots) {
  std::vector<ArrivalTrace> traces(ue_count);
  for (auto& tr : traces) {
    tr.samples = samples;
    tr.slots = slots;
    tr.bits.assign(static_cast<std::size_t>(samples) * slots, 0.0);
  }
  std::string line;
  if (!std::getline(is, line) || line.rfind("ue_id,k,t,bits", 0) != 0)
    throw std::runtime_error("arrival CSV: missing header `ue_id,k,t,bits`");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    long long u, k, t;
    double bits;
    char c1, c2, c3;
    if (!(row >> u >> c1 >> k >> c2 >> t >> c3 >> bits) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw std::runtime_error("arrival CSV: malformed line " +
                               std::to_string(lineno));
    if (u < 0 || u >= ue_count || k < 0 || k >= samples || t < 0 || t >= slots)
      throw std::runtime_error("arrival CSV: index out of range at line " +
                               std::to_string(lineno));
    if (bits < 0.0)
      throw std::runtime_error("arrival CSV: negative bits at line " +
                               std::to_string(lineno));
    traces[u].at(static_cast<int>(k), static_cast<int>(t)) = bits;
  }
  return traces;
}

}  // namespace hyra
