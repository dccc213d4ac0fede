#include "hyra/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyra/kernels.hpp"

namespace hyra {

namespace {

void check_etas(std::span<const double> etas) {
  for (const double e : etas)
    if (!(e > 0.0) || !std::isfinite(e))
      throw std::invalid_argument("scheduler: etas must be positive finite");
}

// lambda_s = min(beta_s, nu): the binding level for a slice is whichever
// stage filled higher (levels are reciprocal water heights, so the higher
// water height is the smaller level).
double slice_dual(double beta, double nu) { return std::min(beta, nu); }

double clip_dual(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v >= -1e-12) return 0.0;
  throw std::logic_error(std::string("scheduler: negative dual ") + what +
                         " = " + std::to_string(v));
}

}  // namespace

double Allocation::total() const {
  double acc = x_sh;
  for (const double x : x_ded) acc += x;
  return acc;
}

void Allocation::validate(int n_slices) const {
  if (static_cast<int>(x_ded.size()) != n_slices)
    throw std::invalid_argument("Allocation: x_ded size != slice count");
  if (!(x_sh >= 0.0) || !std::isfinite(x_sh))
    throw std::invalid_argument("Allocation: x_sh must be >= 0");
  for (const double x : x_ded)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("Allocation: x_ded components must be >= 0");
}

bool Allocation::dominated_by(const Allocation& other) const {
  if (x_sh > other.x_sh) return false;
  for (std::size_t s = 0; s < x_ded.size(); ++s)
    if (x_ded[s] > other.x_ded[s]) return false;
  return true;
}

double solve_water_height(std::span<const double> floors, double budget) {
  if (floors.empty())
    throw std::invalid_argument("solve_water_height: empty UE set with positive budget");
  double lo = floors[0], hi = floors[0];
  for (const double f : floors) {
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  hi += budget;  // excess(hi) >= hi - max floor = budget
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = kernels::excess_sum(mid, floors);
    if (std::abs(r - budget) <= kWaterResidualTol) return mid;
    if (r < budget)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

WaterLevel dedicated_level(std::span<const double> etas, double budget) {
  check_etas(etas);
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw std::invalid_argument("dedicated_level: budget must be >= 0");
  WaterLevel result;
  result.y.assign(etas.size(), 0.0);
  if (budget == 0.0) return result;  // level stays at the +inf sentinel

  std::vector<double> floors(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) floors[i] = 1.0 / etas[i];
  const double h = solve_water_height(floors, budget);
  kernels::excess_fill(h, floors, result.y);
  result.level = 1.0 / h;
  return result;
}

WaterLevel shared_level(std::span<const double> etas,
                        std::span<const double> y_ded, double budget) {
  check_etas(etas);
  if (etas.size() != y_ded.size())
    throw std::invalid_argument("shared_level: etas/y_ded size mismatch");
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw std::invalid_argument("shared_level: budget must be >= 0");
  WaterLevel result;
  result.y.assign(etas.size(), 0.0);
  if (budget == 0.0) return result;

  std::vector<double> floors(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i)
    floors[i] = 1.0 / etas[i] + y_ded[i];
  const double h = solve_water_height(floors, budget);
  kernels::excess_fill(h, floors, result.y);
  result.level = 1.0 / h;
  return result;
}

SlotSolver::SlotSolver(std::vector<int> slice_of, int n_slices)
    : slice_of_(std::move(slice_of)), n_slices_(n_slices) {
  if (n_slices_ < 1)
    throw std::invalid_argument("SlotSolver: need at least one slice");
  slice_ues_.resize(n_slices_);
  for (std::size_t i = 0; i < slice_of_.size(); ++i) {
    const int s = slice_of_[i];
    if (s < 0 || s >= n_slices_)
      throw std::invalid_argument("SlotSolver: slice id out of range");
    slice_ues_[s].push_back(static_cast<int>(i));
  }
  floors_.resize(slice_of_.size());
  slice_floors_.reserve(slice_of_.size());
  slice_y_.reserve(slice_of_.size());
}

void SlotSolver::solve(const Allocation& alloc, std::span<const double> etas,
                       SlotSchedule& out) {
  const std::size_t n = slice_of_.size();
  if (etas.size() != n)
    throw std::invalid_argument("SlotSolver: etas size mismatch");
  alloc.validate(n_slices_);

  out.y_ded.assign(n, 0.0);
  out.y_sh.assign(n, 0.0);
  out.beta.assign(n_slices_, kLevelInf);
  out.lambda.assign(n_slices_, 0.0);
  out.gamma.assign(n, 0.0);
  out.sigma.assign(n, 0.0);

  // Stage one: dedicated leveling inside each slice.
  for (int s = 0; s < n_slices_; ++s) {
    const auto& ues = slice_ues_[s];
    if (alloc.x_ded[s] == 0.0) continue;
    if (ues.empty())
      throw std::invalid_argument(
          "SlotSolver: slice " + std::to_string(s) +
          " has a dedicated budget but no UEs");
    slice_floors_.resize(ues.size());
    slice_y_.resize(ues.size());
    for (std::size_t j = 0; j < ues.size(); ++j)
      slice_floors_[j] = 1.0 / etas[ues[j]];
    const double h = solve_water_height(slice_floors_, alloc.x_ded[s]);
    kernels::excess_fill(h, slice_floors_, slice_y_);
    for (std::size_t j = 0; j < ues.size(); ++j)
      out.y_ded[ues[j]] = slice_y_[j];
    out.beta[s] = 1.0 / h;
  }

  // Stage two: shared leveling across every UE, on top of stage one.
  for (std::size_t i = 0; i < n; ++i) floors_[i] = 1.0 / etas[i] + out.y_ded[i];
  if (alloc.x_sh > 0.0) {
    const double h = solve_water_height(floors_, alloc.x_sh);
    kernels::excess_fill(h, floors_, out.y_sh);
    out.nu = 1.0 / h;
  } else {
    // No shared pool: the dual of the shared constraint is free above the
    // largest marginal utility; pick the smallest valid value.
    double min_height = floors_[0];
    for (const double f : floors_) min_height = std::min(min_height, f);
    out.nu = 1.0 / min_height;
  }

  // Dual recovery from the final water heights.
  for (int s = 0; s < n_slices_; ++s)
    out.lambda[s] = slice_dual(out.beta[s], out.nu);
  for (std::size_t i = 0; i < n; ++i) {
    const double marginal = 1.0 / (floors_[i] + out.y_sh[i]);
    out.gamma[i] = clip_dual(out.lambda[slice_of_[i]] - marginal, "gamma");
    out.sigma[i] = clip_dual(out.nu - marginal, "sigma");
  }
}

SlotSchedule schedule_slot(const Allocation& alloc,
                           std::span<const double> etas,
                           std::span<const int> slice_of, int n_slices) {
  check_etas(etas);
  SlotSolver solver(std::vector<int>(slice_of.begin(), slice_of.end()),
                    n_slices);
  SlotSchedule schedule;
  solver.solve(alloc, etas, schedule);
  return schedule;
}

double slot_utility(std::span<const double> etas,
                    std::span<const double> y_ded,
                    std::span<const double> y_sh) {
  double acc = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i)
    acc += std::log1p(etas[i] * (y_ded[i] + y_sh[i]));
  return acc;
}

double KktReport::max_residual() const {
  return std::max(std::max(stationarity, complementarity),
                  std::max(primal, dual));
}

KktReport kkt_residuals(const SlotSchedule& schedule, const Allocation& alloc,
                        std::span<const double> etas,
                        std::span<const int> slice_of, int n_slices) {
  const std::size_t n = etas.size();
  KktReport report;

  std::vector<double> ded_used(n_slices, 0.0);
  double sh_used = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ded_used[slice_of[i]] += schedule.y_ded[i];
    sh_used += schedule.y_sh[i];

    const double marginal =
        etas[i] / (1.0 + etas[i] * (schedule.y_ded[i] + schedule.y_sh[i]));
    const double lam = schedule.lambda[slice_of[i]];
    report.stationarity = std::max(
        report.stationarity, std::abs(marginal - (lam - schedule.gamma[i])));
    report.stationarity = std::max(
        report.stationarity,
        std::abs(marginal - (schedule.nu - schedule.sigma[i])));

    report.complementarity = std::max(
        report.complementarity, std::abs(schedule.gamma[i] * schedule.y_ded[i]));
    report.complementarity = std::max(
        report.complementarity, std::abs(schedule.sigma[i] * schedule.y_sh[i]));

    report.primal = std::max(report.primal, -schedule.y_ded[i]);
    report.primal = std::max(report.primal, -schedule.y_sh[i]);
    report.dual = std::max(report.dual, -schedule.gamma[i]);
    report.dual = std::max(report.dual, -schedule.sigma[i]);
  }
  for (int s = 0; s < n_slices; ++s) {
    report.complementarity =
        std::max(report.complementarity,
                 std::abs(schedule.lambda[s] * (alloc.x_ded[s] - ded_used[s])));
    report.primal = std::max(report.primal, ded_used[s] - alloc.x_ded[s]);
    report.dual = std::max(report.dual, -schedule.lambda[s]);
  }
  report.complementarity =
      std::max(report.complementarity,
               std::abs(schedule.nu * (alloc.x_sh - sh_used)));
  report.primal = std::max(report.primal, sh_used - alloc.x_sh);
  report.dual = std::max(report.dual, -schedule.nu);

  report.primal = std::max(report.primal, 0.0);
  report.dual = std::max(report.dual, 0.0);
  return report;
}

}  // namespace hyra
