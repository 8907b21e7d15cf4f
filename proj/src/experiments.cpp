#include "aircap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aircap/calibration.hpp"
#include "aircap/error.hpp"

namespace aircap {
namespace {

using ProfitFn = std::function<ProfitBreakdown(double C)>;

std::vector<CapacityPoint> evaluate_with(const ProfitFn& profit, std::span<const double> capacities,
                                         unsigned threads) {
  std::vector<CapacityPoint> out(capacities.size());
  parallel_for(capacities.size(), threads, [&](std::size_t i) {
    CapacityPoint& pt = out[i];
    pt.C = capacities[i];
    try {
      pt.profit = profit(pt.C);
    } catch (const Error& e) {
      pt.ok = false;
      pt.error = e.what();
    }
  });
  return out;
}

// Golden-section refinement on [lo, hi]; falls back to the grid value when
// a solve inside the bracket fails.
LocalMaximum refine_max(const ProfitFn& profit, double lo, double hi, double tol, double grid_C,
                        double grid_profit) {
  LocalMaximum best{grid_C, grid_profit, false};
  try {
    const MaxResult r = golden_section_maximize(
        [&](double C) { return profit(C).operating_profit; }, lo, hi, tol);
    if (r.fx > best.profit) best = {r.x, r.fx, false};
  } catch (const Error&) {
  }
  return best;
}

CapacitySweep sweep_with(const ProfitFn& profit, double alpha, const Grid& grid, double C_init,
                         const SweepOptions& options) {
  grid.validate();
  CapacitySweep out;
  out.alpha = alpha;
  const std::vector<double> cs = grid.values();
  out.points = evaluate_with(profit, cs, options.threads);
  std::size_t best = out.points.size();
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (!out.points[i].ok) {
      ++out.failures;
      continue;
    }
    if (best == out.points.size() ||
        out.points[i].profit.operating_profit > out.points[best].profit.operating_profit) {
      best = i;
    }
  }
  if (best == out.points.size()) fail_numerical("capacity sweep failed at every grid point");
  const double lo = cs[best == 0 ? 0 : best - 1];
  const double hi = cs[std::min(best + 1, cs.size() - 1)];
  const LocalMaximum m = refine_max(profit, lo, hi, options.refine_tol, cs[best],
                                    out.points[best].profit.operating_profit);
  out.optimum_C = m.C;
  out.optimum_profit = m.profit;
  if (options.cap_at_C_init && out.optimum_C < C_init) {
    out.optimum_C = C_init;
    out.optimum_profit = profit(C_init).operating_profit;
    out.capped = true;
  }
  return out;
}

std::string first_error(const CapacitySweep& sweep) {
  for (const auto& p : sweep.points) {
    if (!p.ok) return p.error;
  }
  return {};
}

}  // namespace

void Grid::validate() const {
  require_finite(min, "grid min");
  require_finite(max, "grid max");
  if (!(min < max)) fail_validation("grid min must be < max");
  if (steps < 2) fail_validation("grid needs at least 2 steps");
}

std::vector<double> Grid::values() const {
  validate();
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    v[static_cast<std::size_t>(i)] = (i == steps - 1) ? max : min + (max - min) * i / (steps - 1);
  }
  return v;
}

std::vector<CapacityPoint> evaluate_capacities(const AirportModel& model, double alpha,
                                               std::span<const double> capacities,
                                               unsigned threads) {
  return evaluate_with([&](double C) { return daily_profit(model, C, alpha); }, capacities,
                       threads);
}

CapacitySweep sweep_capacity(const AirportModel& model, double alpha, const Grid& grid,
                             const SweepOptions& options) {
  return sweep_with([&](double C) { return daily_profit(model, C, alpha); }, alpha, grid,
                    model.params.C_init, options);
}

NfSweep sweep_nf(const AirportModel& model, double alpha, std::span<const double> nf_values,
                 const Grid& capacity_grid, const SweepOptions& options) {
  if (nf_values.empty()) fail_validation("n_f grid is empty");
  NfSweep out;
  out.rows.resize(nf_values.size());
  SweepOptions inner = options;
  inner.threads = 1;
  inner.cap_at_C_init = true;
  parallel_for(nf_values.size(), options.threads, [&](std::size_t i) {
    NfRow& row = out.rows[i];
    row.n_f = nf_values[i];
    try {
      AirportModel m = model;
      m.params.n_f = nf_values[i];
      m.params.validate();
      const CapacitySweep sweep = sweep_capacity(m, alpha, capacity_grid, inner);
      row.optimum_C = sweep.optimum_C;
      row.optimum_profit = sweep.optimum_profit;
      row.capped = sweep.capped;
      if (sweep.failures > 0) {
        row.ok = false;
        row.error = first_error(sweep);
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  std::vector<double> x;
  std::vector<double> y;
  const double threshold = model.params.C_init + options.refine_tol;
  for (const NfRow& row : out.rows) {
    if (row.ok && row.optimum_C > threshold) {
      x.push_back(row.n_f);
      y.push_back(row.optimum_C);
    }
  }
  out.tail_points = x.size();
  if (x.size() >= 3) out.tail = fit_line(x, y);
  return out;
}

PredictabilitySweep sweep_predictability(const AirportModel& model, double alpha,
                                         std::span<const double> k_values,
                                         const Grid& capacity_grid, std::optional<double> fixed_C,
                                         const SweepOptions& options) {
  if (k_values.empty()) fail_validation("k grid is empty");
  for (double k : k_values) {
    if (!(k > 0.0 && k <= 1.0)) fail_validation("sigma scale k must lie in (0, 1]");
  }
  PredictabilitySweep out;
  out.fixed_C = fixed_C.value_or(model.params.C_init);
  out.rows.resize(k_values.size());
  std::vector<CorrectedCostCurve> curves(k_values.size());
  std::vector<bool> built(k_values.size(), false);
  parallel_for(k_values.size(), options.threads, [&](std::size_t i) {
    out.rows[i].k = k_values[i];
    try {
      curves[i] = (k_values[i] == 1.0)
                      ? model.curve
                      : build_corrected_curve(model.windows, k_values[i], model.params.sqrt_mtow,
                                              model.coeffs);
      built[i] = true;
    } catch (const Error& e) {
      out.rows[i].ok = false;
      out.rows[i].error = e.what();
    }
  });

  std::vector<CorrectedCostCurve> family;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (built[i]) family.push_back(curves[i]);
  }
  validate_family(family);
  for (std::size_t i = 0, j = 0; i < curves.size(); ++i) {
    if (built[i]) curves[i].validation.family_ordered = family[j++].validation.family_ordered;
  }

  SweepOptions inner = options;
  inner.threads = 1;
  parallel_for(k_values.size(), options.threads, [&](std::size_t i) {
    PredictabilityRow& row = out.rows[i];
    if (!built[i]) return;
    row.curve_r_squared = curves[i].r_squared;
    row.validation = curves[i].validation;
    try {
      AirportModel m = model;
      m.curve = curves[i];
      const ProfitBreakdown at_fixed = daily_profit(m, out.fixed_C, alpha);
      row.profit = at_fixed.operating_profit;
      row.mean_delay = at_fixed.mean_delay();
      const CapacitySweep sweep = sweep_capacity(m, alpha, capacity_grid, inner);
      row.optimum_C = sweep.optimum_C;
      row.optimum_profit = sweep.optimum_profit;
      if (sweep.failures > 0) {
        row.ok = false;
        row.error = first_error(sweep);
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return out;
}

double BreakevenResult::relative_difference() const {
  const double scale = std::max(std::abs(alpha_analytic), std::abs(alpha_root));
  return scale == 0.0 ? 0.0 : std::abs(alpha_analytic - alpha_root) / scale;
}

BreakevenResult breakeven_alpha(const AirportModel& model, double delta_C) {
  require_finite(delta_C, "delta_C");
  if (!(delta_C > 0.0)) fail_validation("delta_C must be > 0");
  const double C0 = model.params.C_init;
  const double C1 = C0 + delta_C;
  BreakevenResult out;
  out.delta_C = delta_C;
  const ProfitBreakdown base = daily_profit(model, C0, 0.0);
  const ProfitBreakdown plus = daily_profit(model, C1, 0.0);
  out.revenue_base = base.aero_revenue + base.non_aero_revenue;
  out.revenue_plus = plus.aero_revenue + plus.non_aero_revenue;
  out.alpha_analytic =
      (out.revenue_plus - out.revenue_base) / (static_cast<double>(kWindowCount) * delta_C);

  auto gap = [&](double alpha) {
    return daily_profit(model, C1, alpha).operating_profit -
           daily_profit(model, C0, alpha).operating_profit;
  };
  const double g0 = gap(0.0);
  if (g0 == 0.0) {
    out.alpha_root = 0.0;
    return out;
  }
  // The gap is decreasing in alpha; walk outwards from 0 until it changes sign.
  const double dir = g0 > 0.0 ? 1.0 : -1.0;
  double far = dir;
  double g_far = gap(far);
  for (int i = 0; i < 200 && (g_far > 0.0) == (g0 > 0.0); ++i) {
    far *= 2.0;
    g_far = gap(far);
  }
  if ((g_far > 0.0) == (g0 > 0.0)) fail_numerical("break-even alpha could not be bracketed");
  RootOptions ro;
  ro.x_tol = 1e-13 * std::abs(far);
  ro.f_tol = 1e-12 * std::max(std::abs(out.revenue_base), 1.0);
  const RootResult r = brent_root(gap, 0.0, far, g0, g_far, ro);
  out.alpha_root = r.x;
  return out;
}

std::vector<ComparisonRow> compare_airports(std::span<const NamedModel> models, double delta_C,
                                            unsigned threads) {
  if (models.size() < 2) fail_validation("comparison needs at least 2 airports");
  std::vector<ComparisonRow> out(models.size());
  parallel_for(models.size(), threads, [&](std::size_t i) {
    ComparisonRow& row = out[i];
    row.name = models[i].name;
    try {
      row.breakeven = breakeven_alpha(models[i].model, delta_C);
      row.daily_cost = static_cast<double>(kWindowCount) * models[i].model.params.c_init;
      if (!(row.daily_cost > 0.0)) fail_validation("daily operating cost must be > 0");
      row.ratio = row.breakeven.alpha_analytic / row.daily_cost;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return out;
}

double exploratory_spend(double w_init, double delay, double delta_t_init,
                         const ExploratorySpendParams& params) {
  const double u = (delay - delta_t_init) / kDelayScale;
  const double shop = params.t_e * u * w_init;
  const double sat = (delay < delta_t_init ? params.s_e : -params.s_e) * u * u * w_init;
  return w_init + shop + sat;
}

std::vector<LocalMaximum> grid_local_maxima(std::span<const CapacityPoint> points) {
  std::vector<LocalMaximum> out;
  const std::size_t n = points.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!points[i].ok || !points[i - 1].ok) {
      ++i;
      continue;
    }
    const double v = points[i].profit.operating_profit;
    if (!(v > points[i - 1].profit.operating_profit)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && points[j + 1].ok && points[j + 1].profit.operating_profit == v) ++j;
    if (j + 1 < n && points[j + 1].ok && points[j + 1].profit.operating_profit < v) {
      if (j == i) {
        out.push_back({points[i].C, v, false});
      } else {
        out.push_back({0.5 * (points[i].C + points[j].C), v, true});
      }
    }
    i = j + 1;
  }
  return out;
}

ExploratoryResult exploratory_profit(const AirportModel& model, double alpha,
                                     const ExploratorySpendParams& params,
                                     const Grid& capacity_grid, const SweepOptions& options) {
  require_finite(params.t_e, "t_e");
  require_finite(params.s_e, "s_e");
  capacity_grid.validate();
  ExploratoryResult out;
  out.delta_t_init = daily_profit(model, model.params.C_init, alpha).mean_delay();
  const double w_init = model.params.w_init;
  const double d0 = out.delta_t_init;
  const SpendFunction spend = [=](double delay) {
    return exploratory_spend(w_init, delay, d0, params);
  };
  const ProfitFn profit = [&](double C) { return daily_profit(model, C, alpha, spend); };
  const std::vector<double> cs = capacity_grid.values();
  out.points = evaluate_with(profit, cs, options.threads);
  const std::vector<LocalMaximum> candidates = grid_local_maxima(out.points);
  out.maxima.resize(candidates.size());
  parallel_for(candidates.size(), options.threads, [&](std::size_t m) {
    const LocalMaximum& cand = candidates[m];
    if (cand.plateau) {
      out.maxima[m] = cand;
      return;
    }
    const auto it = std::find_if(out.points.begin(), out.points.end(),
                                 [&](const CapacityPoint& p) { return p.C == cand.C; });
    const auto idx = static_cast<std::size_t>(it - out.points.begin());
    out.maxima[m] =
        refine_max(profit, cs[idx - 1], cs[idx + 1], options.refine_tol, cand.C, cand.profit);
  });
  return out;
}

std::vector<SmoothnessRow> sensitivity_smoothness(const AirportModel& model,
                                                  std::span<const double> s_values,
                                                  std::optional<double> eval_C, unsigned threads) {
  if (s_values.empty()) fail_validation("smoothness grid is empty");
  for (double s : s_values) {
    if (!(s > 0.0) || !std::isfinite(s)) fail_validation("smoothness values must be > 0");
  }
  const double C = eval_C.value_or(model.params.C_init);
  std::vector<SmoothnessRow> out(s_values.size());
  parallel_for(s_values.size(), threads, [&](std::size_t i) {
    SmoothnessRow& row = out[i];
    row.s = s_values[i];
    try {
      const AirportModel m = recalibrate_smoothness(model, s_values[i], 1);
      const ProfitBreakdown day = daily_profit(m, C, 0.0);
      row.mean_delay = day.mean_delay();
      row.airline_delay_cost = day.airline_delay_cost();
      row.total_traffic = day.total_traffic();
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return out;
}

}  // namespace aircap
