#pragma once

// Expected airline delay cost under per-window shifted-lognormal delay
// distributions, and the smooth corrected-cost curve that turns the 18
// per-window (mean delay, expected cost) points into a continuous function.

#include <span>
#include <string>
#include <vector>

#include "aircap/lognormal.hpp"
#include "aircap/model_core.hpp"

namespace aircap {

struct LogNormalFit {
  ShiftedLogNormal dist;
  std::size_t samples = 0;
  double sample_mean = 0.0;
  double sample_sd = 0.0;
  double log_likelihood = 0.0;
  bool profile_theta = false;  // false: theta came from the fallback shift rule
  bool mean_mismatch = false;  // fitted mean off by more than 5%

  friend bool operator==(const LogNormalFit&, const LogNormalFit&) = default;
};

/// Fits a shifted lognormal to delay samples (minutes). theta maximises the
/// profile likelihood below the sample minimum; (mu, sigma) are the MLE of
/// log(delay - theta). Needs at least 30 finite, not all equal, samples.
LogNormalFit fit_shifted_lognormal(std::span<const double> delays);

/// Same mean, standard deviation multiplied by k (0 < k <= 1), theta fixed.
ShiftedLogNormal scale_sigma(const ShiftedLogNormal& dist, double k);

struct QuadratureResult {
  double value = 0.0;
  int order = 0;             // Gauss-Legendre order that met the tolerance
  double last_change = 0.0;  // |I(2n) - I(n)| at acceptance
};

/// E[raw_cost_of_delay(X)] for X ~ dist. Throws a numerical error carrying
/// the last two estimates if order 512 does not reach 1e-8 relative.
QuadratureResult expected_cost_detailed(const ShiftedLogNormal& dist, double sqrt_mtow,
                                        const CostCoefficients& coeffs);

double expected_cost(const ShiftedLogNormal& dist, double sqrt_mtow,
                     const CostCoefficients& coeffs);

struct CurvePoint {
  double mean_delay = 0.0;
  double expected_cost = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Shape checks on a fitted curve.
struct CurveValidation {
  bool non_negative = true;
  bool monotone = true;
  bool above_raw = true;
  bool family_ordered = true;  // set by validate_family

  [[nodiscard]] bool ok() const { return non_negative && monotone && above_raw && family_ordered; }
  [[nodiscard]] std::vector<std::string> warnings() const;

  friend bool operator==(const CurveValidation&, const CurveValidation&) = default;
};

/// f(x) = 1/2 (1 - tanh(x/s')) (c + d e^{f x}) + 1/2 (1 + tanh(x/s')) c_raw(x)
struct CorrectedCostCurve {
  double c = 0.0;
  double d = 0.0;
  double f = 1.0;
  double s_prime = 1.0;
  CostCoefficients coeffs;
  double sqrt_mtow = 0.0;
  double sigma_scale = 1.0;
  double r_squared = 1.0;
  double residual_norm = 0.0;
  double x_min = 0.0;  // abscissa range of the fitted points
  double x_max = 0.0;
  std::vector<CurvePoint> points;
  CurveValidation validation;

  [[nodiscard]] double operator()(double mean_delay) const;
  [[nodiscard]] double raw(double mean_delay) const;

  /// Range on which the desiderata are checked.
  [[nodiscard]] double eval_lo() const { return x_min - (x_max - x_min); }
  [[nodiscard]] double eval_hi() const { return x_max + 2.0 * (x_max - x_min); }

  /// Throws on non-finite parameters, s' <= 0 or f <= 0.
  void validate() const;

  friend bool operator==(const CorrectedCostCurve&, const CorrectedCostCurve&) = default;
};

double corrected_cost(const CorrectedCostCurve& curve, double mean_delay);

/// Least-squares blend fit (multi-start damped Gauss-Newton) to the given
/// points, followed by the desiderata checks.
CorrectedCostCurve fit_corrected_curve(std::span<const CurvePoint> points, double sigma_scale,
                                       double sqrt_mtow, const CostCoefficients& coeffs);

/// Expected cost of each window's distribution, scaled by sigma_scale, then
/// fitted with fit_corrected_curve.
CorrectedCostCurve build_corrected_curve(std::span<const HourWindow> windows, double sigma_scale,
                                         double sqrt_mtow, const CostCoefficients& coeffs);

/// A curve that is identically zero (zero coefficients, c = d = 0).
CorrectedCostCurve zero_cost_curve();

/// Marks family_ordered on every curve: a curve with smaller sigma_scale must
/// never lie above one with a larger sigma_scale on the shared range.
void validate_family(std::span<CorrectedCostCurve> curves);

/// Recomputes the non-negative / monotone / above-raw flags.
CurveValidation check_desiderata(const CorrectedCostCurve& curve);

}  // namespace aircap
