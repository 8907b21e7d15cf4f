#pragma once

// Three-stage calibration: direct extraction of economic constants,
// functional fits (delay-capacity law, per-window delay distributions) and
// post-calibration of the per-window potential demand beta.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "aircap/cost_engine.hpp"
#include "aircap/equilibrium.hpp"
#include "aircap/model_core.hpp"
#include "aircap/numerics.hpp"
#include "aircap/profit.hpp"

namespace aircap {

struct FlightRecord {
  std::string date;  // YYYY-MM-DD
  int hour = 0;
  int minute = 0;
  double delay_min = 0.0;
  double mtow_t = 0.0;
  double pax = -1.0;  // negative when not given
};

struct AirportFinancials {
  double total_flights = 0.0;
  double total_passengers = 0.0;
  double total_aero_revenue = 0.0;
  double total_non_aero_revenue = 0.0;
  double total_operating_cost = 0.0;
  double period_days = 1.0;
  double value_of_time = 0.0;  // optional, stored only

  void validate() const;
};

struct DirectCalibration {
  double n_f = 0.0;
  double P = 0.0;
  double w_init = 0.0;
  double c_init = 0.0;
  double sqrt_mtow = 0.0;
  double v = 0.0;
  std::array<double, kWindowCount> T_obs{};  // mean departures per window and day
  std::size_t days = 0;                      // distinct dates among the records
};

DirectCalibration direct_calibrate(const AirportFinancials& financials,
                                   std::span<const FlightRecord> records);

/// One observation of the delay-capacity regression: departures in one
/// (day, hour) slot and their mean delay.
struct TrafficDelayPoint {
  double traffic = 0.0;
  double mean_delay = 0.0;
};

/// Groups records by (date, hour) for hours 5..22, in date then hour order.
std::vector<TrafficDelayPoint> hourly_traffic_delay(std::span<const FlightRecord> records);

struct DelayCapacityFit {
  double C = 0.0;
  double cc = 0.0;
  double r_squared = 0.0;
  LinearFit linear;  // delay ~ traffic, for comparison
  std::size_t pairs = 0;

  friend bool operator==(const DelayCapacityFit&, const DelayCapacityFit&) = default;
};

/// Least-squares fit of delay = 120 (exp(T / C) - cc). Needs >= 50 pairs.
DelayCapacityFit fit_delay_capacity(std::span<const TrafficDelayPoint> points);

struct BetaCalibration {
  double beta = 0.0;
  double realized_traffic = 0.0;
  int iterations = 0;
};

/// Finds beta such that the equilibrium realized traffic equals T_obs.
BetaCalibration post_calibrate_beta(double T_obs, double C, const CorrectedCostCurve& curve,
                                    double s, double cc, const EquilibriumOptions& options = {});

struct CalibrationOptions {
  double s = 500.0;
  CostCoefficients coeffs;
  unsigned threads = 1;
};

struct CalibratedAirport {
  AirportModel model;
  DelayCapacityFit capacity_fit;
  std::vector<LogNormalFit> window_fits;
  std::vector<std::string> warnings;

  friend bool operator==(const CalibratedAirport&, const CalibratedAirport&) = default;
};

/// Runs all stages. Failures are re-thrown with the stage name prefixed.
CalibratedAirport calibrate_airport(const AirportFinancials& financials,
                                    std::span<const FlightRecord> records,
                                    const CalibrationOptions& options = {});

/// Re-runs the beta post-calibration for a different smoothness s. The
/// other stages do not depend on s and are kept.
AirportModel recalibrate_smoothness(const AirportModel& model, double s, unsigned threads = 1);

}  // namespace aircap
