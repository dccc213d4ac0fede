#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyra/queue_sim.hpp"
#include "hyra/sample_set.hpp"

namespace hyra {

enum class FormulationKind { hyra, dedicated_only, shared_only };

const char* to_string(FormulationKind k);
FormulationKind formulation_from_string(const std::string& name);

struct MipVar {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;  // +inf for unbounded above
  bool binary = false;
};

enum class RowSense { le, ge, eq };

struct MipRow {
  std::string name;
  std::string family;  // capacity, queue, sla, budget, stationarity, bigm
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

// One single-level formulation: minimize total allocated PRBs subject to the
// queue/SLA system and the reciprocal-dual encoding of the slot scheduler's
// optimality conditions, with Big-M activation binaries.
struct MipModel {
  FormulationKind kind = FormulationKind::hyra;
  int n_slices = 0, n_ues = 0, samples = 0, slots = 0;
  double big_m = 0.0;
  double epsilon = 0.0;
  double x_upper = 0.0;
  std::vector<MipVar> vars;
  std::vector<MipRow> rows;
  std::vector<std::pair<int, double>> objective;  // minimize
  std::unordered_map<std::string, int> index;

  int var(const std::string& name) const;  // throws on unknown name
  std::size_t binary_count() const;
  std::size_t continuous_count() const;
};

struct MipBuildParams {
  FormulationKind kind = FormulationKind::hyra;
  double big_m = 0.0;     // <= 0 picks the default below
  double epsilon = 1e-6;  // encodes the strict positivity of w and mu
  double x_upper = 100.0; // allocation bound; also enters the default M
};

// 10 x max(x_upper, 1 + eta_max (x_upper + 1/epsilon)): headroom over the
// largest magnitude any activation constraint can reach within bounds.
double default_big_m(double eta_max, double x_upper, double epsilon);

MipModel build_mip(const SampleSet& samples, const SlaSpec& sla,
                   const MipBuildParams& params);

// LP interchange text (Minimize / Subject To / Bounds / Binaries sections).
// Byte-stable for identical input.
void export_lp(const MipModel& model, std::ostream& os);
void export_lp_file(const MipModel& model, const std::string& path);

struct LpCounts {
  std::size_t variables = 0;
  std::size_t binaries = 0;
  std::size_t constraints = 0;
};
LpCounts parse_lp_counts(std::istream& is);
LpCounts parse_lp_counts_file(const std::string& path);

using Assignment = std::unordered_map<std::string, double>;

struct ViolationReport {
  std::map<std::string, double> by_family;  // includes "bounds" and "binary"
  double max_violation = 0.0;
  std::string worst;

  double family(const std::string& name) const;
};

// Max violation per constraint family at the given point. Every model
// variable must be assigned.
ViolationReport check_solution(const MipModel& model, const Assignment& point,
                               double binary_tol = 1e-9);

// Largest |lhs| / M ratio over all Big-M activation rows at the point; close
// to 1 means M is too small for this instance.
double big_m_headroom(const MipModel& model, const Assignment& point);

// Runs the water-filling scheduler and work-conserving queues under `alloc`
// and lifts the trajectory into the model's variable space (reciprocal duals
// w = 1/lambda, mu = 1/nu; activity binaries from y > 0).
Assignment lift_assignment(const MipModel& model, const SampleSet& samples,
                           const Allocation& alloc);

// ---- Equivalence of the multiplier form and the reciprocal form ----------
//
// For fixed shared allocations, the slot scheduler's dedicated-side KKT
// system (multipliers lambda, gamma) and its reciprocal encoding (w = 1/lambda)
// describe the same set. These checks sample members of one set, map them,
// and measure membership violation in the other.

struct TransformInstance {
  std::vector<double> etas;
  std::vector<int> slice_of;
  int n_slices = 1;
  std::vector<double> y_sh;
  std::vector<double> x_ded;
};

// Membership violation of (y_ded, w) in the reciprocal set: budget equality,
// eta (y_ded + y_sh - w) >= -1, the product complementarity, and w > 0.
double reciprocal_set_violation(const TransformInstance& inst,
                                std::span<const double> y_ded,
                                std::span<const double> w);

// Membership violation of (y_ded, lambda, gamma) in the multiplier set:
// stationarity, budget inequality, both complementary-slackness products,
// and gamma >= 0.
double multiplier_set_violation(const TransformInstance& inst,
                                std::span<const double> y_ded,
                                std::span<const double> lambda,
                                std::span<const double> gamma);

// Forward: water-fill a member of the multiplier set, map via w = 1/lambda,
// return the max violation of the reciprocal-set constraints.
double check_transform_forward(const TransformInstance& inst);
// Backward: build a member of the reciprocal set from a water height, map
// back via lambda = 1/w and the stationarity formula for gamma, return the
// max violation of the multiplier-set constraints.
double check_transform_backward(const TransformInstance& inst,
                                double water_height);

struct TransformCheckConfig {
  int trials = 1000;
  std::uint64_t seed = 1;
  int max_slices = 2;
  int max_ues_per_slice = 3;
  double tol = 1e-8;
};

struct TransformCheckReport {
  int trials = 0;
  int failures = 0;
  double max_violation = 0.0;
  bool pass() const { return failures == 0; }
};

TransformCheckReport verify_transform_equivalence(
    const TransformCheckConfig& config);

}  // namespace hyra
