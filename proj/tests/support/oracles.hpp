#pragma once

// Independent reference computations for the tests. They restate the model
// formulas directly instead of calling the library versions.

#include <cstdint>
#include <vector>

#include "aircap/cost_engine.hpp"
#include "aircap/lognormal.hpp"

namespace aircap::testing {

/// Delay-traffic law in long double.
long double delay_law(long double T, long double C, long double cc);

/// Raw cost restated from the coefficient definitions, zero below 0.
double raw_cost_ref(double delay, double sqrt_mtow, const CostCoefficients& k);

/// Stratified Monte Carlo estimate of E[cost(X)], X ~ theta + exp(mu + sigma Z).
/// Plain sampling has a standard error of about 0.25% for sigma = 0.8 at
/// 1e7 draws, too close to the tolerances it is used for.
double monte_carlo_expected_cost(const ShiftedLogNormal& dist, double sqrt_mtow,
                                 const CostCoefficients& k, std::size_t draws, std::uint64_t seed);

struct BisectionRoot {
  double delay = 0.0;
  int sign_changes = 0;
};

/// Scans demand - supply on `cells` uniform cells of [lo, hi], counts sign
/// changes and bisects the first one to 1e-12 minutes.
BisectionRoot bisection_equilibrium(double beta, double C, const CorrectedCostCurve& curve,
                                    double s, double cc, double lo, double hi, int cells);

}  // namespace aircap::testing
