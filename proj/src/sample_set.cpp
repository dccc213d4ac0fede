#include "hyra/sample_set.hpp"

#include <stdexcept>
#include <string>

namespace hyra {

SampleSet SampleSet::assemble(std::span<const ArrivalTrace> arrival_traces,
                              std::span<const SeTrace> se_traces,
                              std::span<const int> slice_of, int n_slices) {
  if (arrival_traces.size() != se_traces.size() ||
      arrival_traces.size() != slice_of.size() || arrival_traces.empty())
    throw std::invalid_argument("SampleSet: trace/slice counts disagree");

  SampleSet set;
  set.n_ues = static_cast<int>(arrival_traces.size());
  set.n_slices = n_slices;
  set.samples = arrival_traces[0].samples;
  set.slots = arrival_traces[0].slots;
  set.slice_of.assign(slice_of.begin(), slice_of.end());
  set.arrivals.resize(static_cast<std::size_t>(set.n_ues) * set.samples *
                      set.slots);
  set.eta.resize(set.arrivals.size());

  for (int i = 0; i < set.n_ues; ++i) {
    const ArrivalTrace& at = arrival_traces[i];
    const SeTrace& se = se_traces[i];
    if (at.samples != set.samples || at.slots != set.slots ||
        se.samples != set.samples || se.slots != set.slots)
      throw std::invalid_argument("SampleSet: dimension mismatch for ue " +
                                  std::to_string(i));
    for (int k = 0; k < set.samples; ++k)
      for (int t = 0; t < set.slots; ++t) {
        set.arrivals[set.slot_offset(k, t) + i] = at.at(k, t);
        set.eta[set.slot_offset(k, t) + i] = se.at(k, t);
      }
  }
  set.validate();
  return set;
}

std::vector<int> SampleSet::ues_of_slice(int s) const {
  std::vector<int> ues;
  for (int i = 0; i < n_ues; ++i)
    if (slice_of[i] == s) ues.push_back(i);
  return ues;
}

double SampleSet::total_arrival_bits() const {
  double acc = 0.0;
  for (const double a : arrivals) acc += a;
  return acc;
}

void SampleSet::validate() const {
  if (n_ues < 1 || n_slices < 1 || samples < 1 || slots < 1)
    throw std::invalid_argument("SampleSet: empty dimensions");
  if (static_cast<int>(slice_of.size()) != n_ues)
    throw std::invalid_argument("SampleSet: slice_of size mismatch");
  for (const int s : slice_of)
    if (s < 0 || s >= n_slices)
      throw std::invalid_argument("SampleSet: slice id out of range");
  const std::size_t want =
      static_cast<std::size_t>(n_ues) * samples * slots;
  if (arrivals.size() != want || eta.size() != want)
    throw std::invalid_argument("SampleSet: trace storage size mismatch");
  for (const double a : arrivals)
    if (!(a >= 0.0))
      throw std::invalid_argument("SampleSet: negative arrival bits");
  for (const double e : eta)
    if (!(e > 0.0))
      throw std::invalid_argument("SampleSet: eta must be positive");
}

}  // namespace hyra
