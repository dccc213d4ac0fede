#pragma once

#include <limits>
#include <span>
#include <vector>

namespace hyra {

// Outer-loop decision: dedicated PRB budget per slice plus one shared pool.
struct Allocation {
  std::vector<double> x_ded;
  double x_sh = 0.0;

  double total() const;
  void validate(int n_slices) const;
  bool dominated_by(const Allocation& other) const;  // componentwise <=
};

// One (k,t) slot's schedule: per-UE PRB amounts from each pool, the water
// levels of both stages, and the recovered duals. beta[s] is the reciprocal
// of slice s's dedicated water height and is +inf when the slice got no
// dedicated budget.
struct SlotSchedule {
  std::vector<double> y_ded;
  std::vector<double> y_sh;
  std::vector<double> beta;    // per slice
  double nu = 0.0;
  std::vector<double> lambda;  // per slice
  std::vector<double> gamma;   // per UE
  std::vector<double> sigma;   // per UE

  double total_prbs(int ue) const { return y_ded[ue] + y_sh[ue]; }
};

inline constexpr double kLevelInf = std::numeric_limits<double>::infinity();
// Bisection stops once |sum_i y_i - budget| falls below this.
inline constexpr double kWaterResidualTol = 1e-10;

// Water height h solving sum_i max(h - floors[i], 0) = budget, found by
// bisection on the bracket [min floor, max floor + budget].
double solve_water_height(std::span<const double> floors, double budget);

struct WaterLevel {
  double level = kLevelInf;  // beta or nu (reciprocal of the water height)
  std::vector<double> y;
};

// Stage one for a single slice: level the slice's UEs under its dedicated
// budget. budget = 0 yields all-zero y and the +inf level sentinel.
WaterLevel dedicated_level(std::span<const double> etas, double budget);

// Stage two across all UEs, on top of the dedicated allocation.
WaterLevel shared_level(std::span<const double> etas,
                        std::span<const double> y_ded, double budget);

// Reusable solver for one UE population; keeps scratch buffers so the
// simulator can schedule thousands of slots without reallocating.
class SlotSolver {
 public:
  SlotSolver(std::vector<int> slice_of, int n_slices);

  void solve(const Allocation& alloc, std::span<const double> etas,
             SlotSchedule& out);

  int n_ues() const { return static_cast<int>(slice_of_.size()); }
  int n_slices() const { return n_slices_; }
  const std::vector<int>& slice_of() const { return slice_of_; }

 private:
  std::vector<int> slice_of_;
  std::vector<std::vector<int>> slice_ues_;
  int n_slices_;
  // scratch
  std::vector<double> slice_floors_;
  std::vector<double> slice_y_;
  std::vector<double> floors_;
};

SlotSchedule schedule_slot(const Allocation& alloc,
                           std::span<const double> etas,
                           std::span<const int> slice_of, int n_slices);

// sum_i log(1 + eta_i (y_ded_i + y_sh_i))
double slot_utility(std::span<const double> etas,
                    std::span<const double> y_ded,
                    std::span<const double> y_sh);

struct KktReport {
  double stationarity = 0.0;
  double complementarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;

  double max_residual() const;
};

// Max absolute violations of the slot problem's KKT system at the given
// schedule (which may be externally supplied or perturbed).
KktReport kkt_residuals(const SlotSchedule& schedule, const Allocation& alloc,
                        std::span<const double> etas,
                        std::span<const int> slice_of, int n_slices);

}  // namespace hyra
