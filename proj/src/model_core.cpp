#include "aircap/model_core.hpp"

#include <cmath>
#include <string>

#include "aircap/error.hpp"

namespace aircap {

double ShiftedLogNormal::mean() const { return theta + std::exp(mu + 0.5 * sigma * sigma); }

double ShiftedLogNormal::variance() const {
  const double s2 = sigma * sigma;
  return std::expm1(s2) * std::exp(2.0 * mu + s2);
}

double ShiftedLogNormal::sd() const { return std::sqrt(variance()); }

void ShiftedLogNormal::validate() const {
  require_finite(mu, "lognormal mu");
  require_finite(sigma, "lognormal sigma");
  require_finite(theta, "lognormal theta");
  if (!(sigma > 0.0)) fail_validation("lognormal sigma must be > 0");
  if (!std::isfinite(mean())) fail_validation("lognormal mean is not finite");
}

void AirportParameters::validate() const {
  const std::pair<double, const char*> fields[] = {
      {n_f, "n_f"}, {P, "P"},   {w_init, "w_init"}, {C_init, "C_init"}, {cc, "cc"},
      {c_init, "c_init"}, {sqrt_mtow, "sqrt_mtow"}, {s, "s"}, {v, "v"}};
  for (const auto& [value, name] : fields) require_finite(value, name);
  if (!(n_f > 0.0)) fail_validation("n_f must be > 0");
  if (P < 0.0) fail_validation("P must be >= 0");
  if (w_init < 0.0) fail_validation("w_init must be >= 0");
  if (!(C_init > 0.0)) fail_validation("C_init must be > 0");
  if (!(cc > 0.0)) fail_validation("cc must be > 0");
  if (c_init < 0.0) fail_validation("c_init must be >= 0");
  if (sqrt_mtow < 0.0) fail_validation("sqrt_mtow must be >= 0");
  if (!(s > 0.0)) fail_validation("smoothness s must be > 0");
  if (v < 0.0) fail_validation("value of time v must be >= 0");
}

CostCoefficients CostCoefficients::published() { return {7.0, 0.18, -6.0, -0.092}; }

CostCoefficients CostCoefficients::sign_swapped() { return {-7.0, -0.18, 6.0, 0.092}; }

CostCoefficients CostCoefficients::zero() { return {0.0, 0.0, 0.0, 0.0}; }

CostCoefficients CostCoefficients::preset(std::string_view name) {
  if (name == "published") return published();
  if (name == "sign-swapped") return sign_swapped();
  fail_validation("unknown cost-coefficient preset '" + std::string(name) +
                  "' (expected published or sign-swapped)");
}

void CostCoefficients::validate() const {
  require_finite(a1, "a1");
  require_finite(a2, "a2");
  require_finite(b1, "b1");
  require_finite(b2, "b2");
}

void validate_day(const std::vector<HourWindow>& windows) {
  if (windows.size() != static_cast<std::size_t>(kWindowCount)) {
    fail_validation("a day needs exactly " + std::to_string(kWindowCount) + " windows, got " +
                    std::to_string(windows.size()));
  }
  for (int i = 0; i < kWindowCount; ++i) {
    const HourWindow& w = windows[static_cast<std::size_t>(i)];
    if (w.hour != kFirstHour + i) {
      fail_validation("window " + std::to_string(i) + " must start at hour " +
                      std::to_string(kFirstHour + i));
    }
    require_finite(w.T_obs, "T_obs");
    require_finite(w.beta, "beta");
    if (w.T_obs < 0.0) fail_validation("T_obs must be >= 0");
    if (w.beta < 0.0) fail_validation("beta must be >= 0");
    w.delay_dist.validate();
  }
}

double delay_from_traffic(double T, double C, double cc) {
  require_finite(T, "traffic");
  require_finite(C, "capacity");
  require_finite(cc, "cc");
  if (!(C > 0.0)) fail_validation("capacity must be > 0");
  if (!(cc > 0.0)) fail_validation("cc must be > 0");
  if (T < 0.0) fail_validation("traffic must be >= 0");
  return kDelayScale * (std::exp(T / C) - cc);
}

double traffic_from_delay(double mean_delay, double C, double cc) {
  require_finite(mean_delay, "mean delay");
  require_finite(C, "capacity");
  require_finite(cc, "cc");
  if (!(C > 0.0)) fail_validation("capacity must be > 0");
  const double arg = mean_delay / kDelayScale + cc;
  if (!(arg > 0.0)) fail_validation("mean delay outside the log domain (delay/120 + cc <= 0)");
  return C * std::log(arg);
}

double raw_cost_of_delay(double delay, double sqrt_mtow, const CostCoefficients& coeffs) {
  require_finite(delay, "delay");
  require_finite(sqrt_mtow, "sqrt_mtow");
  if (delay < 0.0) return 0.0;
  return coeffs.linear(sqrt_mtow) * delay + coeffs.quadratic(sqrt_mtow) * delay * delay;
}

double operate_probability(double cost, double s) {
  require_finite(s, "smoothness");
  if (!(s > 0.0)) fail_validation("smoothness s must be > 0");
  if (std::isnan(cost)) fail_validation("cost must not be NaN");
  const double x = cost / s;
  if (x > 0.0) {
    const double e = std::exp(-x);
    return 2.0 * e / (1.0 + e);
  }
  return 2.0 / (1.0 + std::exp(x));
}

HourlyRevenue hourly_revenue(const AirportParameters& params, double w, double operate_prob,
                             double beta) {
  const double traffic = operate_prob * beta;
  return {params.P * traffic, params.n_f * w * traffic};
}

double capacity_cost(double alpha, double C, const AirportParameters& params) {
  return alpha * (C - params.C_init) + params.c_init;
}

}  // namespace aircap
