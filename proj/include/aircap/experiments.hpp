#pragma once

// Experiment suite over a calibrated airport: capacity, passengers-per-flight
// and predictability sweeps, break-even capacity cost, the delay-dependent
// spend model and the smoothness sensitivity sweep. Grid points are
// evaluated independently and collected by index, so results do not depend
// on the thread count.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aircap/numerics.hpp"
#include "aircap/profit.hpp"

namespace aircap {

/// Uniform grid of `steps` points from min to max inclusive.
struct Grid {
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  void validate() const;
  [[nodiscard]] std::vector<double> values() const;
};

struct SweepOptions {
  unsigned threads = 1;
  bool cap_at_C_init = false;  // report max(optimum, C_init)
  double refine_tol = 1e-3;    // flights/h
};

struct CapacityPoint {
  double C = 0.0;
  bool ok = true;
  std::string error;
  ProfitBreakdown profit;
};

struct CapacitySweep {
  double alpha = 0.0;
  std::vector<CapacityPoint> points;
  double optimum_C = 0.0;
  double optimum_profit = 0.0;
  bool capped = false;
  std::size_t failures = 0;
};

/// daily_profit at each capacity; failures are recorded per point.
std::vector<CapacityPoint> evaluate_capacities(const AirportModel& model, double alpha,
                                               std::span<const double> capacities,
                                               unsigned threads = 1);

/// Grid sweep plus golden-section refinement around the best grid point.
CapacitySweep sweep_capacity(const AirportModel& model, double alpha, const Grid& grid,
                             const SweepOptions& options = {});

struct NfRow {
  double n_f = 0.0;
  double optimum_C = 0.0;
  double optimum_profit = 0.0;
  bool capped = false;
  bool ok = true;
  std::string error;
};

struct NfSweep {
  std::vector<NfRow> rows;
  std::optional<LinearFit> tail;  // optimum_C ~ n_f over rows above the cap
  std::size_t tail_points = 0;
};

NfSweep sweep_nf(const AirportModel& model, double alpha, std::span<const double> nf_values,
                 const Grid& capacity_grid, const SweepOptions& options = {});

struct PredictabilityRow {
  double k = 1.0;
  bool ok = true;
  std::string error;
  double profit = 0.0;      // at the fixed capacity
  double mean_delay = 0.0;  // traffic-weighted, at the fixed capacity
  double optimum_C = 0.0;
  double optimum_profit = 0.0;
  double curve_r_squared = 0.0;
  CurveValidation validation;
};

struct PredictabilitySweep {
  double fixed_C = 0.0;
  std::vector<PredictabilityRow> rows;
};

/// For each k the window distributions are narrowed by k at fixed mean, the
/// cost curve is refitted and the day re-solved. fixed_C defaults to C_init.
PredictabilitySweep sweep_predictability(const AirportModel& model, double alpha,
                                         std::span<const double> k_values,
                                         const Grid& capacity_grid,
                                         std::optional<double> fixed_C = std::nullopt,
                                         const SweepOptions& options = {});

struct BreakevenResult {
  double delta_C = 0.0;
  double revenue_base = 0.0;  // EUR/day at C_init
  double revenue_plus = 0.0;  // EUR/day at C_init + delta_C
  double alpha_analytic = 0.0;
  double alpha_root = 0.0;
  [[nodiscard]] double relative_difference() const;
};

/// Capacity cost per unit and hour at which adding delta_C leaves the daily
/// profit unchanged, computed in closed form and by root finding.
BreakevenResult breakeven_alpha(const AirportModel& model, double delta_C);

struct NamedModel {
  std::string name;
  AirportModel model;
};

struct ComparisonRow {
  std::string name;
  bool ok = true;
  std::string error;
  BreakevenResult breakeven;
  double daily_cost = 0.0;  // 18 * c_init
  double ratio = 0.0;       // alpha* / daily_cost
};

std::vector<ComparisonRow> compare_airports(std::span<const NamedModel> models, double delta_C,
                                            unsigned threads = 1);

struct ExploratorySpendParams {
  double t_e = 0.0;
  double s_e = 0.0;
};

/// Spend per passenger at a window delay, given the airport's reference
/// delay delta_t_init.
double exploratory_spend(double w_init, double delay, double delta_t_init,
                         const ExploratorySpendParams& params);

struct LocalMaximum {
  double C = 0.0;
  double profit = 0.0;
  bool plateau = false;
};

struct ExploratoryResult {
  double delta_t_init = 0.0;
  std::vector<CapacityPoint> points;
  std::vector<LocalMaximum> maxima;
};

/// delta_t_init is the traffic-weighted equilibrium delay of the model at
/// C_init; spend is evaluated at each window's equilibrium delay.
ExploratoryResult exploratory_profit(const AirportModel& model, double alpha,
                                     const ExploratorySpendParams& params,
                                     const Grid& capacity_grid, const SweepOptions& options = {});

/// Grid points strictly above both neighbours, with flat runs
/// collapsed to their midpoint. Exposed for testing.
std::vector<LocalMaximum> grid_local_maxima(std::span<const CapacityPoint> points);

struct SmoothnessRow {
  double s = 0.0;
  bool ok = true;
  std::string error;
  double mean_delay = 0.0;
  double airline_delay_cost = 0.0;  // EUR/day
  double total_traffic = 0.0;
};

/// Re-post-calibrates beta for each s and reports the day at eval_C
/// (default C_init).
std::vector<SmoothnessRow> sensitivity_smoothness(const AirportModel& model,
                                                  std::span<const double> s_values,
                                                  std::optional<double> eval_C = std::nullopt,
                                                  unsigned threads = 1);

}  // namespace aircap
