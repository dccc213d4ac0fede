#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <vector>

#include "hyra/queue_sim.hpp"
#include "hyra/selfcheck.hpp"

using namespace hyra;

TEST_CASE("step_queue basic cases") {
  SUBCASE("no service") {
    const QueueStep step = step_queue(0.0, 100.0, 0.0);
    CHECK(step.next_backlog == 100.0);
    CHECK(step.served == 0.0);
  }
  SUBCASE("capacity 168*4*1 clears a 600-bit backlog") {
    const QueueStep step = step_queue(500.0, 100.0, 168.0 * 4.0 * 1.0);
    CHECK(step.next_backlog == 0.0);
    CHECK(step.served == 600.0);
  }
  SUBCASE("saturation") {
    const QueueStep step = step_queue(500.0, 100.0, 400.0);
    CHECK(step.next_backlog == 200.0);
    CHECK(step.served == 400.0);
  }
  CHECK_THROWS(step_queue(-1.0, 0.0, 0.0));
}

namespace {

// single-UE sample set with prescribed arrivals and constant eta
SampleSet tiny_set(const std::vector<double>& arrivals, double eta) {
  ArrivalTrace at;
  at.samples = 1;
  at.slots = static_cast<int>(arrivals.size());
  at.bits = arrivals;
  SeTrace se;
  se.samples = 1;
  se.slots = at.slots;
  se.eta.assign(arrivals.size(), eta);
  const std::vector<int> slice_of{0};
  return SampleSet::assemble(std::vector<ArrivalTrace>{at},
                             std::vector<SeTrace>{se}, slice_of, 1);
}

}  // namespace

TEST_CASE("hand-computed Little's-law ratio") {
  // arrivals [100, 100]; capacity forced so end-of-slot backlogs are
  // [100, 50]: d = (100 + 50) / 200 = 0.75 slots
  // slot 1 serves 0, slot 2 serves 150 => y = 150/(168 eta) in slot 2
  const double eta = 2.0;
  SampleSet samples = tiny_set({100.0, 100.0}, eta);

  // no dedicated pool; shared pool sized per-slot via a custom allocation is
  // not expressible, so emulate with the step primitive directly:
  double backlog = 0.0, served_total = 0.0, backlog_sum = 0.0;
  const std::vector<double> capacity{0.0, 150.0};
  for (int t = 0; t < 2; ++t) {
    const QueueStep step = step_queue(backlog, samples.arrival(0, 0, t),
                                      capacity[t]);
    backlog = step.next_backlog;
    served_total += step.served;
    backlog_sum += backlog;
  }
  CHECK(backlog_sum / 200.0 == doctest::Approx(0.75));
  CHECK(served_total + backlog == doctest::Approx(200.0));
}

TEST_CASE("simulate sums end-of-slot backlogs in the delay ratio") {
  // constant capacity 75 bits/slot: backlogs after each slot are [25, 50],
  // so d = (25 + 50) / 200 = 0.375; summing the pre-service trajectory
  // (initial zero included, final excluded) would give 0.125 instead
  const double eta = 2.0;
  SampleSet samples = tiny_set({100.0, 100.0}, eta);
  Allocation alloc;
  alloc.x_ded = {75.0 / (168.0 * eta)};
  alloc.x_sh = 0.0;
  const SimResult sim = simulate(alloc, samples);
  CHECK(sim.delays.mean_delay[0] == doctest::Approx(0.375).epsilon(1e-9));
}

TEST_CASE("overprovisioned allocations keep every delay at zero") {
  SampleSet samples = tiny_set({800.0, 0.0, 1200.0, 400.0}, 4.0);
  Allocation alloc;
  alloc.x_ded = {50.0};
  alloc.x_sh = 0.0;
  const SimResult sim = simulate(alloc, samples);
  for (const double d : sim.delays.mean_delay) CHECK(d == 0.0);
  for (const double q : sim.queues.backlog) CHECK(q == 0.0);
}

TEST_CASE("zero-arrival samples report zero delay and are flagged") {
  SampleSet samples = tiny_set({0.0, 0.0, 0.0}, 2.0);
  Allocation alloc;
  alloc.x_ded = {1.0};
  alloc.x_sh = 0.0;
  const SimResult sim = simulate(alloc, samples);
  CHECK(sim.delays.mean_delay[0] == 0.0);
  CHECK(sim.delays.ue_had_arrivals[0] == 0);
}

TEST_CASE("flow conservation and capacity bound over random scenarios") {
  const CheckResult r = check_queue_conservation(25, 99);
  CAPTURE(r.detail);
  CHECK(r.pass);
}

TEST_CASE("componentwise-larger allocations never increase a delay") {
  const CheckResult r = check_delay_monotonicity(40, 123);
  CAPTURE(r.detail);
  CHECK(r.pass);
}

TEST_CASE("sla boundary: per-UE vs slice-aggregated") {
  DelayReport report;
  report.n_ues = 2;
  report.samples = 1;
  report.per_sample = {2.0, 4.0};
  report.mean_delay = {2.0, 4.0};
  report.slice_mean = {3.0};
  report.ue_had_arrivals = {1, 1};
  const std::vector<int> slice_of{0, 0};

  SlaSpec per_ue;
  per_ue.mode = SlaSpec::Mode::per_ue;
  per_ue.slice_budget_ms = {3.0};
  const SlaCheck strict = sla_satisfied(report, per_ue, slice_of, 1);
  CHECK_FALSE(strict.satisfied);
  CHECK(strict.worst_margin == doctest::Approx(-1.0));
  CHECK(strict.margins[0] == doctest::Approx(1.0));
  CHECK(strict.margins[1] == doctest::Approx(-1.0));

  SlaSpec agg;
  agg.mode = SlaSpec::Mode::slice_aggregated;
  agg.slice_budget_ms = {3.0};
  const SlaCheck relaxed = sla_satisfied(report, agg, slice_of, 1);
  CHECK(relaxed.satisfied);  // boundary inclusive: mean 3 <= 3
  CHECK(relaxed.worst_margin == doctest::Approx(0.0));
}

TEST_CASE("per-UE budget overrides replace the slice budget") {
  DelayReport report;
  report.n_ues = 2;
  report.samples = 1;
  report.per_sample = {2.0, 4.0};
  report.mean_delay = {2.0, 4.0};
  report.slice_mean = {3.0};
  report.ue_had_arrivals = {1, 1};
  const std::vector<int> slice_of{0, 0};

  SlaSpec sla;
  sla.mode = SlaSpec::Mode::per_ue;
  sla.slice_budget_ms = {3.0};
  sla.ue_budget_ms = {3.0, 5.0};
  const SlaCheck check = sla_satisfied(report, sla, slice_of, 1);
  CHECK(check.satisfied);
  CHECK(check.worst_margin == doctest::Approx(1.0));
}

TEST_CASE("delay report CSV shape") {
  SampleSet samples = tiny_set({500.0, 500.0}, 2.0);
  Allocation alloc;
  alloc.x_ded = {0.5};
  alloc.x_sh = 0.0;
  const SimResult sim = simulate(alloc, samples);
  std::stringstream os;
  write_delay_csv(os, sim.delays, samples.slice_of);
  std::string header;
  std::getline(os, header);
  CHECK(header == "ue_id,slice,d_mean,d_k0");
}
