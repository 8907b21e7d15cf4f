#pragma once

// Domain types and the constituent equations of the airport capacity model:
// delay-traffic law, airline delay cost, operate probability, airport
// revenue and capacity operating cost. All functions are pure.

#include <string>
#include <string_view>
#include <vector>

#include "aircap/lognormal.hpp"

namespace aircap {

/// The operating day is split into one-hour windows starting 05:00..22:00.
inline constexpr int kFirstHour = 5;
inline constexpr int kLastHour = 22;
inline constexpr int kWindowCount = kLastHour - kFirstHour + 1;

/// Delay scale of the exponential delay-traffic law (minutes).
inline constexpr double kDelayScale = 120.0;

/// Per-airport calibrated constants.
struct AirportParameters {
  double n_f = 0.0;        // passengers per flight
  double P = 0.0;          // aeronautical revenue per flight (EUR)
  double w_init = 0.0;     // non-aeronautical revenue per passenger (EUR)
  double C_init = 0.0;     // current departure capacity (flights/h)
  double cc = 1.0;         // delay offset at zero traffic
  double c_init = 0.0;     // current operating cost (EUR/h)
  double sqrt_mtow = 0.0;  // fleet mean of sqrt(MTOW in tonnes)
  double s = 500.0;        // airline decision smoothness (EUR)
  double v = 0.0;          // value of time (EUR/min); stored only

  /// Throws a validation error if any bound is violated.
  void validate() const;

  friend bool operator==(const AirportParameters&, const AirportParameters&) = default;
};

/// Quadratic delay-cost coefficients. The effective linear coefficient is
/// a1 + b1*sqrt(MTOW), the quadratic one a2 + b2*sqrt(MTOW).
struct CostCoefficients {
  double a1 = 7.0;
  double a2 = 0.18;
  double b1 = -6.0;
  double b2 = -0.092;

  [[nodiscard]] double linear(double sqrt_mtow) const { return a1 + b1 * sqrt_mtow; }
  [[nodiscard]] double quadratic(double sqrt_mtow) const { return a2 + b2 * sqrt_mtow; }

  /// Coefficients as published.
  static CostCoefficients published();
  /// Published values with the signs of both groups swapped, which keeps
  /// costs positive for realistic fleets (sqrt(MTOW) above ~1.96).
  static CostCoefficients sign_swapped();
  static CostCoefficients zero();
  /// "published" or "sign-swapped"; anything else is a validation error.
  static CostCoefficients preset(std::string_view name);

  void validate() const;

  friend bool operator==(const CostCoefficients&, const CostCoefficients&) = default;
};

/// One one-hour slice of the operating day.
struct HourWindow {
  int hour = kFirstHour;
  double T_obs = 0.0;  // observed mean departures (flights/h)
  double beta = 0.0;   // potential demand (flights/h)
  ShiftedLogNormal delay_dist;

  friend bool operator==(const HourWindow&, const HourWindow&) = default;
};

/// Checks the 18-window day structure (hours 5..22 in order, T_obs >= 0,
/// beta >= 0, valid distributions).
void validate_day(const std::vector<HourWindow>& windows);

/// Mean delay (minutes) produced by traffic T at capacity C:
/// 120 * (exp(T / C) - cc). Negative values mean early departures.
double delay_from_traffic(double T, double C, double cc);

/// Inverse of delay_from_traffic: C * ln(delay / 120 + cc).
double traffic_from_delay(double mean_delay, double C, double cc);

/// Airline cost of a single delay (EUR); zero for early departures.
double raw_cost_of_delay(double delay, double sqrt_mtow, const CostCoefficients& coeffs);

/// Probability that the airline operates the flight, 2 / (1 + exp(cost/s)).
double operate_probability(double cost, double s);

struct HourlyRevenue {
  double aero = 0.0;
  double non_aero = 0.0;
  [[nodiscard]] double total() const { return aero + non_aero; }
};

/// Airport revenue in one window: (P + n_f * w) * P_a * beta.
HourlyRevenue hourly_revenue(const AirportParameters& params, double w, double operate_prob,
                             double beta);

/// Operating cost of running capacity C (EUR/h): alpha*(C - C_init) + c_init.
double capacity_cost(double alpha, double C, const AirportParameters& params);

}  // namespace aircap
