#include "hyra/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hyra {

void SearchSpec::validate() const {
  if (!(grid_step > 0.0))
    throw std::invalid_argument("SearchSpec: grid_step must be positive");
  if (!(x_max >= grid_step))
    throw std::invalid_argument("SearchSpec: x_max must be >= grid_step");
  if (refinement_rounds < 0)
    throw std::invalid_argument("SearchSpec: refinement_rounds must be >= 0");
}

namespace {

// Search over the mode's active components. Dimension order is
// (x_ded_0 .. x_ded_{S-1}, x_sh) restricted to the mode; candidates are
// enumerated in ascending total and lexicographically within a total, so the
// first feasible hit is the lexicographically smallest optimum among ties.
class GridSearch {
 public:
  GridSearch(const SearchSpec& spec, const SampleSet& samples,
             const SlaSpec& sla)
      : spec_(spec),
        samples_(samples),
        sla_(sla),
        solver_(samples.slice_of, samples.n_slices) {
    use_ded_ = spec.mode != FormulationKind::shared_only;
    use_sh_ = spec.mode != FormulationKind::dedicated_only;
    dims_ = (use_ded_ ? samples.n_slices : 0) + (use_sh_ ? 1 : 0);
  }

  OptResult run(std::span<const Allocation> seeds) {
    result_ = OptResult{};

    // Infeasible even with every component maxed out: report, don't raise.
    const std::vector<double> corner(dims_, spec_.x_max);
    if (!feasible(to_allocation(corner))) {
      result_.feasible = false;
      result_.best_relaxed = to_allocation(corner);
      result_.best = result_.best_relaxed;
      result_.total = result_.total_relaxed = result_.best.total();
      return result_;
    }

    step_ = spec_.grid_step;
    const long max_units =
        static_cast<long>(std::floor(spec_.x_max / step_ + 1e-9));

    // Per-axis probes seed the infeasibility frontier and bound where the
    // ascending-total scan has to start.
    const std::vector<long> lb = axis_lower_bounds(max_units);
    long lb_total = 0;
    bool lattice_reachable = true;
    for (const long v : lb) {
      if (v > max_units) lattice_reachable = false;
      lb_total += std::min(v, max_units);
    }

    std::vector<double> incumbent;
    if (lattice_reachable) {
      std::vector<long> c(dims_, 0);
      for (long total = lb_total; total <= max_units * dims_; ++total)
        if (scan_total(total, max_units, c, 0)) {
          incumbent.resize(dims_);
          for (int d = 0; d < dims_; ++d)
            incumbent[d] = static_cast<double>(c[d]) * step_;
          break;
        }
    }
    if (incumbent.empty()) incumbent = corner;  // x_max off the lattice

    // Caller-supplied starting points (e.g. baseline optima) compete with
    // the grid incumbent directly.
    for (const Allocation& seed : seeds) {
      const std::vector<double> c = from_allocation(seed);
      if (total_of(c) < total_of(incumbent) &&
          try_candidate(to_allocation(c)))
        incumbent = c;
    }

    // Local refinement: halve the step and rescan a one-step box around the
    // incumbent; the frontier built so far keeps pruning.
    double span = step_;
    for (int round = 0; round < spec_.refinement_rounds; ++round) {
      const double fine = span / 2.0;
      incumbent = refine_box(incumbent, span, fine);
      span = fine;
    }

    // Integer PRBs cost the objective, so pick the final point by ceiled
    // total: the refined incumbent or any seed, whichever ceilings cheaper.
    choose_final(incumbent);
    for (const Allocation& seed : seeds) choose_final(from_allocation(seed));

    result_.feasible = true;
    result_.best_relaxed = to_allocation(final_relaxed_);
    result_.total_relaxed = result_.best_relaxed.total();
    result_.best = to_allocation(final_ceiled_);
    result_.total = result_.best.total();
    // fresh feasibility pass on the reported point
    result_.feasible = feasible(result_.best);
    return result_;
  }

 private:
  static constexpr std::size_t kPrunedAuditCap = 4096;

  Allocation to_allocation(std::span<const double> c) const {
    Allocation alloc;
    alloc.x_ded.assign(samples_.n_slices, 0.0);
    std::size_t d = 0;
    if (use_ded_)
      for (int s = 0; s < samples_.n_slices; ++s) alloc.x_ded[s] = c[d++];
    if (use_sh_) alloc.x_sh = c[d];
    return alloc;
  }

  std::vector<double> from_allocation(const Allocation& alloc) const {
    std::vector<double> c;
    c.reserve(dims_);
    if (use_ded_)
      for (int s = 0; s < samples_.n_slices; ++s) c.push_back(alloc.x_ded[s]);
    if (use_sh_) c.push_back(alloc.x_sh);
    return c;
  }

  static double total_of(std::span<const double> c) {
    double acc = 0.0;
    for (const double v : c) acc += v;
    return acc;
  }

  bool feasible(const Allocation& alloc) {
    ++result_.evaluations;
    const SimResult sim = simulate(alloc, samples_, solver_, ws_);
    return sla_satisfied(sim.delays, sla_, samples_.slice_of,
                         samples_.n_slices)
        .satisfied;
  }

  bool dominated_by_infeasible(const Allocation& alloc) const {
    for (const Allocation& p : frontier_)
      if (alloc.dominated_by(p)) return true;
    return false;
  }

  void record_infeasible(const Allocation& alloc) {
    std::erase_if(frontier_,
                  [&](const Allocation& p) { return p.dominated_by(alloc); });
    frontier_.push_back(alloc);
  }

  bool try_candidate(const Allocation& alloc) {
    if (dominated_by_infeasible(alloc)) {
      ++result_.pruned;
      if (result_.pruned_points.size() < kPrunedAuditCap)
        result_.pruned_points.push_back(alloc);
      return false;
    }
    if (feasible(alloc)) return true;
    record_infeasible(alloc);
    return false;
  }

  // Smallest lattice value per axis that is feasible with every other
  // component at x_max. Values above max_units mean not even the top lattice
  // point works on that axis. All infeasible probes land in the frontier.
  std::vector<long> axis_lower_bounds(long max_units) {
    std::vector<long> lb(dims_, 0);
    for (int d = 0; d < dims_; ++d) {
      std::vector<double> c(dims_, spec_.x_max);
      c[d] = 0.0;
      if (try_candidate(to_allocation(c))) continue;
      c[d] = static_cast<double>(max_units) * step_;
      if (!try_candidate(to_allocation(c))) {
        lb[d] = max_units + 1;
        continue;
      }
      long lo = 0, hi = max_units;  // lo infeasible, hi feasible
      while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        c[d] = static_cast<double>(mid) * step_;
        if (try_candidate(to_allocation(c)))
          hi = mid;
        else
          lo = mid;
      }
      lb[d] = hi;
    }
    return lb;
  }

  // Enumerate compositions of `total` lattice units in lexicographic order;
  // true once a feasible candidate is found (left in c).
  bool scan_total(long total, long max_units, std::vector<long>& c,
                  std::size_t d) {
    if (d + 1 == c.size()) {
      if (total > max_units) return false;
      c[d] = total;
      std::vector<double> point(dims_);
      for (int j = 0; j < dims_; ++j)
        point[j] = static_cast<double>(c[j]) * step_;
      return try_candidate(to_allocation(point));
    }
    for (long v = 0; v <= std::min(total, max_units); ++v) {
      c[d] = v;
      if (scan_total(total - v, max_units, c, d + 1)) return true;
    }
    return false;
  }

  std::vector<double> refine_box(const std::vector<double>& center,
                                 double span, double fine) {
    std::vector<double> lo(dims_);
    std::vector<long> steps(dims_);
    for (int d = 0; d < dims_; ++d) {
      lo[d] = std::max(0.0, center[d] - span);
      const double hi = std::min(spec_.x_max, center[d] + span);
      steps[d] = static_cast<long>(std::round((hi - lo[d]) / fine));
    }
    const double best_total = total_of(center);

    std::vector<long> c(dims_, 0);
    long max_total_units = 0;
    for (const long s : steps) max_total_units += s;
    for (long total = 0; total <= max_total_units; ++total) {
      if (total_of(lo) + static_cast<double>(total) * fine >=
          best_total - 1e-12)
        break;  // no cheaper point left in the box
      if (refine_scan(total, steps, lo, fine, c, 0)) {
        std::vector<double> better(dims_);
        for (int d = 0; d < dims_; ++d)
          better[d] = lo[d] + static_cast<double>(c[d]) * fine;
        return better;
      }
    }
    return center;
  }

  bool refine_scan(long total, std::span<const long> steps,
                   std::span<const double> lo, double fine,
                   std::vector<long>& c, std::size_t d) {
    if (d + 1 == c.size()) {
      if (total > steps[d]) return false;
      c[d] = total;
      std::vector<double> point(dims_);
      for (int j = 0; j < dims_; ++j)
        point[j] = lo[j] + static_cast<double>(c[j]) * fine;
      return try_candidate(to_allocation(point));
    }
    for (long v = 0; v <= std::min(total, steps[d]); ++v) {
      c[d] = v;
      if (refine_scan(total - v, steps, lo, fine, c, d + 1)) return true;
    }
    return false;
  }

  static std::vector<double> ceil_components(std::span<const double> c) {
    std::vector<double> out(c.size());
    for (std::size_t d = 0; d < c.size(); ++d)
      out[d] = std::ceil(c[d] - 1e-9);
    return out;
  }

  void choose_final(const std::vector<double>& relaxed) {
    const std::vector<double> ceiled = ceil_components(relaxed);
    if (!final_relaxed_.empty() &&
        total_of(ceiled) >= total_of(final_ceiled_) - 1e-12)
      return;
    final_relaxed_ = relaxed;
    final_ceiled_ = ceiled;
  }

  const SearchSpec& spec_;
  const SampleSet& samples_;
  const SlaSpec& sla_;
  SlotSolver solver_;
  SimWorkspace ws_;
  bool use_ded_ = true, use_sh_ = true;
  int dims_ = 0;
  double step_ = 1.0;
  std::vector<Allocation> frontier_;
  std::vector<double> final_relaxed_, final_ceiled_;
  OptResult result_;
};

}  // namespace

OptResult minimize_allocation(const SearchSpec& spec, const SampleSet& samples,
                              const SlaSpec& sla,
                              std::span<const Allocation> seed_candidates) {
  spec.validate();
  samples.validate();
  sla.validate(samples.n_slices, samples.n_ues);
  GridSearch search(spec, samples, sla);
  return search.run(seed_candidates);
}

double savings_vs_baselines(double hyra_total, double ded_total,
                            double sh_total) {
  const double baseline_mean = 0.5 * (ded_total + sh_total);
  if (!(baseline_mean > 0.0)) return 0.0;
  return 1.0 - hyra_total / baseline_mean;
}

StrategyComparison compare_strategies(const SampleSet& samples,
                                      const SlaSpec& sla,
                                      const SearchSpec& search) {
  StrategyComparison cmp;
  SearchSpec spec = search;

  spec.mode = FormulationKind::dedicated_only;
  cmp.dedicated = minimize_allocation(spec, samples, sla);
  spec.mode = FormulationKind::shared_only;
  cmp.shared = minimize_allocation(spec, samples, sla);

  // The pure optima are hybrid-feasible points; seeding them keeps the
  // hybrid result at or below both baselines under common random numbers.
  std::vector<Allocation> seeds;
  if (cmp.dedicated.feasible) seeds.push_back(cmp.dedicated.best_relaxed);
  if (cmp.shared.feasible) seeds.push_back(cmp.shared.best_relaxed);
  spec.mode = FormulationKind::hyra;
  cmp.hyra = minimize_allocation(spec, samples, sla, seeds);

  cmp.all_feasible =
      cmp.hyra.feasible && cmp.dedicated.feasible && cmp.shared.feasible;
  cmp.savings_vs_baseline_mean = savings_vs_baselines(
      cmp.hyra.total, cmp.dedicated.total, cmp.shared.total);
  return cmp;
}

namespace {

void write_result_row(std::ostream& os, const char* mode, const OptResult& r,
                      int n_slices) {
  char buf[64];
  os << mode;
  for (int s = 0; s < n_slices; ++s) {
    std::snprintf(buf, sizeof(buf), "%.9g", r.best.x_ded[s]);
    os << ',' << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.9g", r.best.x_sh);
  os << ',' << buf;
  std::snprintf(buf, sizeof(buf), "%.9g", r.total);
  os << ',' << buf << ',' << (r.feasible ? 1 : 0) << ',' << r.evaluations
     << '\n';
}

}  // namespace

void write_comparison_csv(std::ostream& os, const StrategyComparison& cmp,
                          int n_slices) {
  os << "mode";
  for (int s = 1; s <= n_slices; ++s) os << ",x_ded_" << s;
  os << ",x_sh,total,feasible,evals\n";
  write_result_row(os, "hyra", cmp.hyra, n_slices);
  write_result_row(os, "dedicated_only", cmp.dedicated, n_slices);
  write_result_row(os, "shared_only", cmp.shared, n_slices);
}

}  // namespace hyra
