#pragma once

// Daily airport operating profit: every hour window is solved at the same
// capacity and the window revenues are summed.

#include <functional>
#include <vector>

#include "aircap/cost_engine.hpp"
#include "aircap/equilibrium.hpp"
#include "aircap/model_core.hpp"

namespace aircap {

/// A calibrated airport: parameters, the 18 windows with beta and delay
/// distributions, and the corrected cost curve at sigma-scale 1.
struct AirportModel {
  AirportParameters params;
  CostCoefficients coeffs;
  std::vector<HourWindow> windows;
  CorrectedCostCurve curve;

  void validate() const;

  friend bool operator==(const AirportModel&, const AirportModel&) = default;
};

struct WindowOutcome {
  int hour = 0;
  double revenue = 0.0;           // EUR/h
  double realized_traffic = 0.0;  // flights/h
  double mean_delay = 0.0;        // minutes
  double operate_prob = 1.0;
  double expected_cost = 0.0;     // airline cost per flight at mean_delay (EUR)
};

struct ProfitBreakdown {
  double aero_revenue = 0.0;      // EUR/day
  double non_aero_revenue = 0.0;  // EUR/day
  double capacity_cost = 0.0;     // EUR/day
  double operating_profit = 0.0;  // aero + non_aero - capacity_cost
  std::vector<WindowOutcome> per_window;

  [[nodiscard]] double total_traffic() const;
  /// Traffic-weighted mean equilibrium delay; plain mean if there is no traffic.
  [[nodiscard]] double mean_delay() const;
  /// Sum over windows of realized flights times expected cost per flight.
  [[nodiscard]] double airline_delay_cost() const;
};

/// Non-aeronautical spend per passenger as a function of the window's
/// equilibrium mean delay.
using SpendFunction = std::function<double(double mean_delay)>;

ProfitBreakdown daily_profit(const AirportModel& model, double C, double alpha,
                             const EquilibriumOptions& options = {});

/// As above with per-window spend w(delay) instead of the constant w_init.
ProfitBreakdown daily_profit(const AirportModel& model, double C, double alpha,
                             const SpendFunction& spend, const EquilibriumOptions& options = {});

}  // namespace aircap
