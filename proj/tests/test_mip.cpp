#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hyra/mip.hpp"
#include "hyra/optimizer.hpp"
#include "hyra/selfcheck.hpp"

using namespace hyra;

namespace {

SampleSet fixed_tiny_set(int n_slices, const std::vector<int>& ue_per_slice,
                         int K, int T, std::uint64_t seed) {
  Scenario sc;
  sc.slices.clear();
  for (int s = 0; s < n_slices; ++s) {
    SliceConfig slice;
    slice.ue_count = ue_per_slice[s];
    slice.delay_budget_ms = 3.0 + 2.0 * s;
    slice.traffic.inter_arrival_ms = {1.5, 0.4};
    slice.traffic.packet_size_bits = {1.5, 1.0};
    slice.traffic.target_load_bits_per_ms = 400.0;
    slice.channel.profile = "mixed";
    sc.slices.push_back(slice);
  }
  sc.samples = K;
  sc.slots = T;
  sc.seeds = {seed};
  return build_sample_set(sc, seed);
}

std::size_t count_prefix(const MipModel& model, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& v : model.vars)
    if (v.name.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("binary and variable counts follow the closed forms") {
  // 2 slices, 4 UEs total, K=1, T=2
  const SampleSet samples = fixed_tiny_set(2, {2, 2}, 1, 2, 5);
  MipBuildParams params;

  SUBCASE("hyra: one zded and one zsh per UE per slot") {
    params.kind = FormulationKind::hyra;
    const MipModel m = build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue,
                                                  {3.0, 5.0},
                                                  {}},
                                 params);
    CHECK(m.binary_count() == 2 * 4 * 1 * 2);  // 16
    CHECK(count_prefix(m, "zded_") == 8);
    CHECK(count_prefix(m, "zsh_") == 8);
    CHECK(count_prefix(m, "yded_") == 8);
    CHECK(count_prefix(m, "ysh_") == 8);
    CHECK(count_prefix(m, "q_") == 4 * 1 * 3);  // t = 0..T
    CHECK(count_prefix(m, "w_") == 2 * 1 * 2);
    CHECK(count_prefix(m, "mu_") == 1 * 2);
    CHECK(count_prefix(m, "xded_") == 2);
    CHECK(count_prefix(m, "xsh") == 1);
  }

  SUBCASE("dedicated-only: |U| K T binaries, no shared symbols") {
    params.kind = FormulationKind::dedicated_only;
    const MipModel m = build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue,
                                                  {3.0, 5.0},
                                                  {}},
                                 params);
    CHECK(m.binary_count() == 4 * 1 * 2);  // 8
    CHECK(count_prefix(m, "ysh_") == 0);
    CHECK(count_prefix(m, "zsh_") == 0);
    CHECK(count_prefix(m, "mu_") == 0);
    CHECK(count_prefix(m, "xsh") == 0);
  }

  SUBCASE("shared-only: no dedicated symbols") {
    params.kind = FormulationKind::shared_only;
    const MipModel m = build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue,
                                                  {3.0, 5.0},
                                                  {}},
                                 params);
    CHECK(m.binary_count() == 4 * 1 * 2);
    CHECK(count_prefix(m, "yded_") == 0);
    CHECK(count_prefix(m, "zded_") == 0);
    CHECK(count_prefix(m, "w_") == 0);
    CHECK(count_prefix(m, "xded_") == 0);
  }
}

TEST_CASE("constraint counts match enumeration for all kinds") {
  const int n = 4, K = 1, T = 2, S = 2;
  const SampleSet samples = fixed_tiny_set(S, {2, 2}, K, T, 6);
  const SlaSpec sla{SlaSpec::Mode::per_ue, {3.0, 5.0}, {}};

  std::size_t sla_rows = 0;  // UEs with at least one nonzero-arrival sample
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < T; ++t) any = any || samples.arrival(i, k, t) > 0;
    if (any) ++sla_rows;
  }

  MipBuildParams params;
  params.kind = FormulationKind::hyra;
  const MipModel hyra_model = build_mip(samples, sla, params);
  CHECK(hyra_model.rows.size() ==
        10 * n * K * T + S * K * T + K * T + sla_rows);

  params.kind = FormulationKind::dedicated_only;
  const MipModel ded = build_mip(samples, sla, params);
  CHECK(ded.rows.size() == 6 * n * K * T + S * K * T + sla_rows);

  params.kind = FormulationKind::shared_only;
  const MipModel sh = build_mip(samples, sla, params);
  CHECK(sh.rows.size() == 6 * n * K * T + K * T + sla_rows);
}

TEST_CASE("LP export round-trips counts and is byte-stable") {
  const SampleSet samples = fixed_tiny_set(2, {2, 1}, 1, 2, 7);
  MipBuildParams params;
  params.kind = FormulationKind::hyra;
  const MipModel model =
      build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue, {3.0, 5.0}, {}},
                params);

  std::stringstream first, second;
  export_lp(model, first);
  export_lp(model, second);
  CHECK(first.str() == second.str());

  std::stringstream reread(first.str());
  const LpCounts counts = parse_lp_counts(reread);
  CHECK(counts.variables == model.vars.size());
  CHECK(counts.binaries == model.binary_count());
  CHECK(counts.constraints == model.rows.size());
}

TEST_CASE("lifted operating points satisfy every constraint") {
  const CheckResult r = check_mip_consistency(6, 21);
  CAPTURE(r.detail);
  CHECK(r.pass);
}

TEST_CASE("zero assignment on a loaded instance is reported infeasible") {
  const SampleSet samples = fixed_tiny_set(1, {2}, 1, 2, 9);
  REQUIRE(samples.total_arrival_bits() > 0);
  MipBuildParams params;
  params.kind = FormulationKind::hyra;
  const MipModel model =
      build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue, {3.0}, {}}, params);

  Assignment zero;
  for (const auto& v : model.vars) zero[v.name] = 0.0;
  const ViolationReport report = check_solution(model, zero);
  CHECK(report.max_violation > 1e-3);
  CHECK(report.family("queue") > 0.0);   // arrivals with no service
  CHECK(report.family("bounds") > 0.0);  // w and mu must stay positive
}

TEST_CASE("perturbing a reciprocal level breaks the activation rows") {
  const SampleSet samples = fixed_tiny_set(1, {2}, 1, 1, 11);
  const SlaSpec sla{SlaSpec::Mode::per_ue, {4.0}, {}};
  MipBuildParams params;
  params.kind = FormulationKind::hyra;
  const MipModel model = build_mip(samples, sla, params);

  Allocation alloc;
  alloc.x_ded = {2.0};
  alloc.x_sh = 1.0;
  Assignment lifted = lift_assignment(model, samples, alloc);
  REQUIRE(check_solution(model, lifted).max_violation <= 1e-6);
  REQUIRE(lifted.at("zded_0_0_0") + lifted.at("zded_1_0_0") > 0.0);

  lifted["w_0_0_0"] += 0.05;
  const ViolationReport report = check_solution(model, lifted);
  CHECK(report.family("bigm") > 1e-3);
}

TEST_CASE("check_solution requires a complete assignment") {
  const SampleSet samples = fixed_tiny_set(1, {1}, 1, 1, 13);
  MipBuildParams params;
  params.kind = FormulationKind::shared_only;
  const MipModel model =
      build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue, {3.0}, {}}, params);
  Assignment partial;
  partial["xsh"] = 1.0;
  CHECK_THROWS_AS(check_solution(model, partial), std::invalid_argument);
}

TEST_CASE("default big-M formula and guards") {
  CHECK(default_big_m(7.4, 100.0, 1e-6) ==
        doctest::Approx(10.0 * (1.0 + 7.4 * (100.0 + 1e6))));
  const SampleSet samples = fixed_tiny_set(1, {1}, 1, 1, 15);
  MipBuildParams params;
  params.epsilon = 0.0;
  CHECK_THROWS(build_mip(samples, SlaSpec{SlaSpec::Mode::per_ue, {3.0}, {}},
                         params));
}

TEST_CASE("slice-aggregated SLA replaces per-UE rows with one per slice") {
  const SampleSet samples = fixed_tiny_set(2, {2, 2}, 1, 2, 17);
  MipBuildParams params;
  params.kind = FormulationKind::hyra;
  const SlaSpec agg{SlaSpec::Mode::slice_aggregated, {3.0, 5.0}, {}};
  const MipModel model = build_mip(samples, agg, params);
  std::size_t sla_rows = 0;
  for (const auto& row : model.rows)
    if (row.family == "sla") ++sla_rows;
  CHECK(sla_rows <= 2);
  CHECK(sla_rows >= 1);
}

// ---- transform equivalence -------------------------------------------------

TEST_CASE("transform equivalence holds over random instances") {
  TransformCheckConfig config;
  config.trials = 1000;
  config.seed = 29;
  const TransformCheckReport report = verify_transform_equivalence(config);
  CAPTURE(report.max_violation);
  CHECK(report.trials == 1000);
  CHECK(report.failures == 0);
  CHECK(report.max_violation <= 1e-8);
}

TEST_CASE("budget-equality violation is caught in the reciprocal set") {
  TransformInstance inst;
  inst.etas = {2.0, 1.0};
  inst.slice_of = {0, 0};
  inst.n_slices = 1;
  inst.y_sh = {0.0, 0.0};
  inst.x_ded = {1.0};

  // water height 1.25 tops both UEs up to x_ded = 1; claiming a different
  // budget breaks the equality row
  std::vector<double> y_ded{0.75, 0.25};
  std::vector<double> w{1.25};
  CHECK(reciprocal_set_violation(inst, y_ded, w) <= 1e-12);
  inst.x_ded = {1.5};
  CHECK(reciprocal_set_violation(inst, y_ded, w) ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("single-UE slice with dedicated share forces gamma to zero") {
  TransformInstance inst;
  inst.etas = {2.0};
  inst.slice_of = {0};
  inst.n_slices = 1;
  inst.y_sh = {0.3};
  inst.x_ded = {1.2};

  CHECK(check_transform_forward(inst) <= 1e-10);
  // by hand: water height = floor + y_ded = 1/2 + 0.3 + 1.2 = 2.0 = 1/lambda
  const double height = 1.0 / inst.etas[0] + inst.y_sh[0] + inst.x_ded[0];
  const double lambda = 1.0 / height;
  const double marginal =
      inst.etas[0] / (1.0 + inst.etas[0] * (inst.x_ded[0] + inst.y_sh[0]));
  CHECK(lambda == doctest::Approx(marginal).epsilon(1e-12));  // gamma = 0
}

TEST_CASE("backward direction accepts sampled reciprocal points") {
  TransformInstance inst;
  inst.etas = {3.0, 1.5, 0.8};
  inst.slice_of = {0, 0, 1};
  inst.n_slices = 2;
  inst.y_sh = {0.1, 0.0, 0.5};
  inst.x_ded = {0.0, 0.0};  // recomputed inside from the height
  for (const double height : {0.4, 0.9, 1.7, 3.0})
    CHECK(check_transform_backward(inst, height) <= 1e-10);
}
