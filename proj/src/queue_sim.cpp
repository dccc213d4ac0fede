#include "hyra/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hyra/channel.hpp"
#include "hyra/kernels.hpp"

namespace hyra {

QueueStep step_queue(double backlog, double arrivals, double capacity) {
  if (!(backlog >= 0.0) || !(arrivals >= 0.0) || !(capacity >= 0.0))
    throw std::invalid_argument("step_queue: inputs must be nonnegative");
  const double pending = backlog + arrivals;
  const double served = std::min(pending, capacity);
  return {pending - served, served};
}

SimResult simulate(const Allocation& alloc, const SampleSet& samples) {
  SlotSolver solver(samples.slice_of, samples.n_slices);
  SimWorkspace ws;
  return simulate(alloc, samples, solver, ws);
}

SimResult simulate(const Allocation& alloc, const SampleSet& samples,
                   SlotSolver& solver, SimWorkspace& ws) {
  const int n = samples.n_ues;
  const int K = samples.samples;
  const int T = samples.slots;
  alloc.validate(samples.n_slices);
  if (solver.n_ues() != n)
    throw std::invalid_argument("simulate: solver/sample UE count mismatch");

  SimResult result;
  result.queues.n_ues = n;
  result.queues.samples = K;
  result.queues.slots = T;
  result.queues.backlog.resize(static_cast<std::size_t>(n) * K * T);
  result.queues.served.resize(result.queues.backlog.size());

  ws.capacity.resize(n);
  ws.state.resize(n);

  result.delays.n_ues = n;
  result.delays.samples = K;
  result.delays.per_sample.assign(static_cast<std::size_t>(n) * K, 0.0);
  result.delays.mean_delay.assign(n, 0.0);
  result.delays.ue_had_arrivals.assign(n, 0);

  for (int k = 0; k < K; ++k) {
    std::fill(ws.state.begin(), ws.state.end(), 0.0);
    for (int t = 0; t < T; ++t) {
      const auto etas = samples.eta_at(k, t);
      solver.solve(alloc, etas, ws.schedule);
      ws.totals.resize(n);
      for (int i = 0; i < n; ++i)
        ws.totals[i] = ws.schedule.y_ded[i] + ws.schedule.y_sh[i];
      kernels::prb_capacity(etas, ws.totals, kSymbolsPerPrb, ws.capacity);
      const std::size_t off = samples.slot_offset(k, t);
      kernels::queue_step(
          ws.state, samples.arrivals_at(k, t), ws.capacity,
          std::span<double>(result.queues.backlog.data() + off, n),
          std::span<double>(result.queues.served.data() + off, n));
      std::copy_n(result.queues.backlog.data() + off, n, ws.state.begin());
    }
  }

  for (int i = 0; i < n; ++i) {
    double saa = 0.0;
    for (int k = 0; k < K; ++k) {
      double backlog_sum = 0.0, arrival_sum = 0.0;
      for (int t = 0; t < T; ++t) {
        backlog_sum += result.queues.backlog[result.queues.idx(i, k, t)];
        arrival_sum += samples.arrival(i, k, t);
      }
      const double d = arrival_sum > 0.0 ? backlog_sum / arrival_sum : 0.0;
      if (arrival_sum > 0.0) result.delays.ue_had_arrivals[i] = 1;
      result.delays.per_sample[static_cast<std::size_t>(i) * K + k] = d;
      saa += d;
    }
    result.delays.mean_delay[i] = saa / K;
  }

  result.delays.slice_mean.assign(samples.n_slices, 0.0);
  std::vector<int> slice_count(samples.n_slices, 0);
  for (int i = 0; i < n; ++i) {
    result.delays.slice_mean[samples.slice_of[i]] +=
        result.delays.mean_delay[i];
    ++slice_count[samples.slice_of[i]];
  }
  for (int s = 0; s < samples.n_slices; ++s)
    if (slice_count[s] > 0) result.delays.slice_mean[s] /= slice_count[s];

  return result;
}

void SlaSpec::validate(int n_slices, int n_ues) const {
  if (static_cast<int>(slice_budget_ms.size()) != n_slices)
    throw std::invalid_argument("SlaSpec: need one delay budget per slice");
  for (const double d : slice_budget_ms)
    if (!(d > 0.0))
      throw std::invalid_argument("SlaSpec: delay budgets must be positive");
  if (!ue_budget_ms.empty()) {
    if (static_cast<int>(ue_budget_ms.size()) != n_ues)
      throw std::invalid_argument("SlaSpec: per-UE budgets must cover all UEs");
    for (const double d : ue_budget_ms)
      if (!(d > 0.0))
        throw std::invalid_argument("SlaSpec: delay budgets must be positive");
  }
}

const char* to_string(SlaSpec::Mode m) {
  return m == SlaSpec::Mode::per_ue ? "per_ue" : "slice_aggregated";
}

SlaSpec::Mode sla_mode_from_string(const std::string& name) {
  if (name == "per_ue") return SlaSpec::Mode::per_ue;
  if (name == "slice_aggregated") return SlaSpec::Mode::slice_aggregated;
  throw std::invalid_argument("unknown SLA mode: " + name);
}

SlaCheck sla_satisfied(const DelayReport& report, const SlaSpec& sla,
                       std::span<const int> slice_of, int n_slices) {
  const int n = report.n_ues;
  sla.validate(n_slices, n);

  SlaCheck check;
  check.satisfied = true;
  if (sla.mode == SlaSpec::Mode::per_ue) {
    check.margins.resize(n);
    for (int i = 0; i < n; ++i) {
      const double budget = sla.ue_budget_ms.empty()
                                ? sla.slice_budget_ms[slice_of[i]]
                                : sla.ue_budget_ms[i];
      check.margins[i] = budget - report.mean_delay[i];
    }
  } else {
    check.margins.resize(n_slices);
    for (int s = 0; s < n_slices; ++s)
      check.margins[s] = sla.slice_budget_ms[s] - report.slice_mean[s];
  }
  check.worst_margin = *std::min_element(check.margins.begin(),
                                         check.margins.end());
  check.satisfied = check.worst_margin >= 0.0;
  return check;
}

void write_delay_csv(std::ostream& os, const DelayReport& report,
                     std::span<const int> slice_of) {
  os << "ue_id,slice,d_mean";
  for (int k = 0; k < report.samples; ++k) os << ",d_k" << k;
  os << '\n';
  char buf[64];
  for (int i = 0; i < report.n_ues; ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", report.mean_delay[i]);
    os << i << ',' << slice_of[i] << ',' << buf;
    for (int k = 0; k < report.samples; ++k) {
      std::snprintf(buf, sizeof(buf), "%.9g", report.delay(i, k));
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace hyra
