#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

namespace aircap::testing {

long double delay_law(long double T, long double C, long double cc) {
  return 120.0L * (std::exp(T / C) - cc);
}

double raw_cost_ref(double delay, double sqrt_mtow, const CostCoefficients& k) {
  if (delay < 0.0) return 0.0;
  const double lin = k.a1 + k.b1 * sqrt_mtow;
  const double quad = k.a2 + k.b2 * sqrt_mtow;
  return delay * (lin + quad * delay);
}

double monte_carlo_expected_cost(const ShiftedLogNormal& dist, double sqrt_mtow,
                                 const CostCoefficients& k, std::size_t draws, std::uint64_t seed) {
  // One uniform draw inside each of `draws` equal-probability strata.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const boost::math::normal_distribution<double> unit;
  long double sum = 0.0L;
  for (std::size_t i = 0; i < draws; ++i) {
    double p = (static_cast<double>(i) + u(rng)) / static_cast<double>(draws);
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);
    const double z = boost::math::quantile(unit, p);
    const double x = dist.theta + std::exp(dist.mu + dist.sigma * z);
    sum += raw_cost_ref(x, sqrt_mtow, k);
  }
  return static_cast<double>(sum / static_cast<long double>(draws));
}

namespace {

double residual_ref(double d, double beta, double C, const CorrectedCostCurve& curve, double s,
                    double cc) {
  const double demand = 2.0 / (1.0 + std::exp(curve(d) / s));
  const double supply = C / beta * std::log(d / 120.0 + cc);
  return demand - supply;
}

}  // namespace

BisectionRoot bisection_equilibrium(double beta, double C, const CorrectedCostCurve& curve,
                                    double s, double cc, double lo, double hi, int cells) {
  BisectionRoot out;
  double a = lo;
  double fa = residual_ref(a, beta, C, curve, s, cc);
  double root_lo = 0.0;
  double root_hi = 0.0;
  for (int i = 1; i <= cells; ++i) {
    const double b = lo + (hi - lo) * i / cells;
    const double fb = residual_ref(b, beta, C, curve, s, cc);
    if ((fa > 0.0) != (fb > 0.0)) {
      if (out.sign_changes == 0) {
        root_lo = a;
        root_hi = b;
      }
      ++out.sign_changes;
    }
    a = b;
    fa = fb;
  }
  if (out.sign_changes == 0) return out;
  double flo = residual_ref(root_lo, beta, C, curve, s, cc);
  while (root_hi - root_lo > 1e-12) {
    const double mid = 0.5 * (root_lo + root_hi);
    if (mid == root_lo || mid == root_hi) break;
    const double fm = residual_ref(mid, beta, C, curve, s, cc);
    if ((fm > 0.0) == (flo > 0.0)) {
      root_lo = mid;
      flo = fm;
    } else {
      root_hi = mid;
    }
  }
  out.delay = 0.5 * (root_lo + root_hi);
  return out;
}

}  // namespace aircap::testing
