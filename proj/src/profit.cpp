#include "aircap/profit.hpp"

#include "aircap/error.hpp"

namespace aircap {
namespace {

ProfitBreakdown evaluate(const AirportModel& model, double C, double alpha,
                         const SpendFunction* spend, const EquilibriumOptions& options) {
  require_finite(alpha, "alpha");
  if (!(C > 0.0)) fail_validation("capacity must be > 0");
  const AirportParameters& p = model.params;
  ProfitBreakdown out;
  out.per_window.reserve(model.windows.size());
  for (const HourWindow& window : model.windows) {
    EquilibriumResult eq;
    try {
      eq = solve_window(window, C, model.curve, p.s, p.cc, options);
    } catch (const Error& e) {
      rethrow_with_stage(e, "window " + std::to_string(window.hour));
    }
    const double w = spend ? (*spend)(eq.mean_delay) : p.w_init;
    const HourlyRevenue rev = hourly_revenue(p, w, eq.operate_prob, window.beta);
    out.aero_revenue += rev.aero;
    out.non_aero_revenue += rev.non_aero;
    out.per_window.push_back({window.hour, rev.total(), eq.realized_traffic, eq.mean_delay,
                              eq.operate_prob, model.curve(eq.mean_delay)});
  }
  out.capacity_cost = static_cast<double>(kWindowCount) * capacity_cost(alpha, C, p);
  out.operating_profit = out.aero_revenue + out.non_aero_revenue - out.capacity_cost;
  return out;
}

}  // namespace

void AirportModel::validate() const {
  params.validate();
  coeffs.validate();
  validate_day(windows);
  curve.validate();
}

double ProfitBreakdown::total_traffic() const {
  double t = 0.0;
  for (const auto& w : per_window) t += w.realized_traffic;
  return t;
}

double ProfitBreakdown::mean_delay() const {
  double weighted = 0.0;
  double total = 0.0;
  double plain = 0.0;
  for (const auto& w : per_window) {
    weighted += w.realized_traffic * w.mean_delay;
    total += w.realized_traffic;
    plain += w.mean_delay;
  }
  if (total > 0.0) return weighted / total;
  return per_window.empty() ? 0.0 : plain / static_cast<double>(per_window.size());
}

double ProfitBreakdown::airline_delay_cost() const {
  double c = 0.0;
  for (const auto& w : per_window) c += w.realized_traffic * w.expected_cost;
  return c;
}

ProfitBreakdown daily_profit(const AirportModel& model, double C, double alpha,
                             const EquilibriumOptions& options) {
  return evaluate(model, C, alpha, nullptr, options);
}

ProfitBreakdown daily_profit(const AirportModel& model, double C, double alpha,
                             const SpendFunction& spend, const EquilibriumOptions& options) {
  return evaluate(model, C, alpha, &spend, options);
}

}  // namespace aircap
