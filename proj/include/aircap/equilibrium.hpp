#pragma once

// Per-window equilibrium: the mean delay at which the airlines' operate
// probability (demand) equals the traffic the capacity can carry at that
// delay (supply, the inverted delay-traffic law).

#include <span>
#include <vector>

#include "aircap/cost_engine.hpp"
#include "aircap/model_core.hpp"
#include "aircap/numerics.hpp"

namespace aircap {

struct EquilibriumOptions {
  RootOptions root;
  // Multiplies the padding of the initial bracket. Results must not depend
  // on it; tests use it to check that.
  double bracket_scale = 1.0;
  int max_expansions = 60;
};

struct EquilibriumResult {
  double mean_delay = 0.0;        // minutes
  double operate_prob = 1.0;
  double realized_traffic = 0.0;  // operate_prob * beta
  double residual = 0.0;          // demand - supply at mean_delay
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool multiple_roots = false;    // only possible for curves that failed validation
};

/// Demand minus supply at a given mean delay:
/// operate_probability(curve(delay), s) - (C / beta) * ln(delay / 120 + cc).
double equilibrium_residual(double mean_delay, double beta, double C, const CorrectedCostCurve& curve,
                            double s, double cc);

EquilibriumResult solve_window(double beta, double C, const CorrectedCostCurve& curve, double s,
                               double cc, const EquilibriumOptions& options = {});

EquilibriumResult solve_window(const HourWindow& window, double C, const CorrectedCostCurve& curve,
                               double s, double cc, const EquilibriumOptions& options = {});

struct TraceRow {
  double delay = 0.0;
  double demand = 0.0;   // operate probability
  double supply = 0.0;   // (C / beta) * ln(delay / 120 + cc); NaN outside the log domain
  bool in_domain = true;
};

/// Both sides of the equilibrium equation on a delay grid, for plotting.
/// beta must be > 0.
std::vector<TraceRow> demand_supply_trace(const HourWindow& window, double C,
                                          const CorrectedCostCurve& curve, double s, double cc,
                                          std::span<const double> delay_grid);

}  // namespace aircap
