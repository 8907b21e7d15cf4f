#include "aircap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aircap/error.hpp"

namespace aircap {
namespace {

constexpr int kRootScanPoints = 400;

void check_inputs(double beta, double C, double s, double cc) {
  require_finite(beta, "beta");
  require_finite(C, "capacity");
  require_finite(s, "smoothness s");
  require_finite(cc, "cc");
  if (beta < 0.0) fail_validation("beta must be >= 0");
  if (!(C > 0.0)) fail_validation("capacity must be > 0");
  if (!(s > 0.0)) fail_validation("smoothness s must be > 0");
  if (!(cc > 0.0)) fail_validation("cc must be > 0");
}

EquilibriumResult finish(double delay, double beta, double C, const CorrectedCostCurve& curve,
                         double s, double cc) {
  EquilibriumResult out;
  out.mean_delay = delay;
  out.operate_prob = operate_probability(curve(delay), s);
  out.realized_traffic = out.operate_prob * beta;
  out.residual = equilibrium_residual(delay, beta, C, curve, s, cc);
  return out;
}

}  // namespace

double equilibrium_residual(double mean_delay, double beta, double C,
                            const CorrectedCostCurve& curve, double s, double cc) {
  const double demand = operate_probability(curve(mean_delay), s);
  return demand - (C / beta) * std::log(mean_delay / kDelayScale + cc);
}

EquilibriumResult solve_window(double beta, double C, const CorrectedCostCurve& curve, double s,
                               double cc, const EquilibriumOptions& options) {
  check_inputs(beta, C, s, cc);
  curve.validate();
  if (beta == 0.0) {
    EquilibriumResult out;
    out.mean_delay = delay_from_traffic(0.0, C, cc);
    out.bracket_lo = out.bracket_hi = out.mean_delay;
    return out;
  }
  if (!(options.bracket_scale > 0.0 && options.bracket_scale < 100.0)) {
    fail_validation("bracket_scale must lie in (0, 100)");
  }

  auto g = [&](double x) { return equilibrium_residual(x, beta, C, curve, s, cc); };

  // At lo the supply side is negative while demand is positive; at `far`
  // the supply exceeds 1 while demand is at most 1 for non-negative costs.
  // For beta well above C, far is astronomically large, so the upper end
  // grows geometrically from lo and stops at the first sign change.
  const double pad = options.bracket_scale;
  double lo = kDelayScale * (1.0 - cc) - pad;
  const double far = delay_from_traffic(beta, C, cc) + pad;
  double g_lo = g(lo);
  if (!(g_lo > 0.0)) {
    std::ostringstream msg;
    msg << "equilibrium residual is not positive at the lower bracket end " << lo;
    fail_numerical(msg.str());
  }
  // Untrusted curves are scanned for every root, so they keep the full range.
  const bool trusted = curve.validation.monotone && curve.validation.non_negative;
  double hi = trusted ? std::min(lo + 2.0 * pad, far) : far;
  double g_hi = g(hi);
  while (g_hi > 0.0 && hi < far && std::isfinite(hi)) {
    hi = std::min(lo + 2.0 * (hi - lo), far);
    g_hi = g(hi);
  }
  int expansions = 0;
  while (g_hi > 0.0 && expansions < options.max_expansions) {
    hi = lo + 2.0 * (hi - lo);
    g_hi = g(hi);
    ++expansions;
  }
  if (g_hi > 0.0 || !std::isfinite(g_hi)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "equilibrium bracket expansion failed after " << expansions
        << " doublings; final bracket [" << lo << ", " << hi << "]";
    fail_numerical(msg.str());
  }

  if (trusted) {
    const RootResult root = brent_root(g, lo, hi, g_lo, g_hi, options.root);
    EquilibriumResult out = finish(root.x, beta, C, curve, s, cc);
    out.iterations = root.iterations;
    out.bracket_lo = root.lo;
    out.bracket_hi = root.hi;
    if (!root.converged && std::abs(out.residual) > options.root.f_tol) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "equilibrium solver did not converge; bracket [" << root.lo << ", " << root.hi
          << "], residual " << out.residual;
      fail_numerical(msg.str());
    }
    return out;
  }

  // Demand may be non-monotone: locate every sign change and keep the root
  // nearest the supply-side anchor.
  const double anchor_pa = operate_probability(curve(delay_from_traffic(beta, C, cc)), s);
  const double anchor = delay_from_traffic(beta * std::min(anchor_pa, 1.0), C, cc);
  double best = std::numeric_limits<double>::quiet_NaN();
  RootResult best_root;
  int roots = 0;
  double x_prev = lo;
  double g_prev = g_lo;
  for (int i = 1; i <= kRootScanPoints; ++i) {
    const double x = lo + (hi - lo) * i / kRootScanPoints;
    const double gx = (i == kRootScanPoints) ? g_hi : g(x);
    if ((g_prev > 0.0) != (gx > 0.0)) {
      const RootResult root = brent_root(g, x_prev, x, g_prev, gx, options.root);
      ++roots;
      if (std::isnan(best) || std::abs(root.x - anchor) < std::abs(best - anchor)) {
        best = root.x;
        best_root = root;
      }
    }
    x_prev = x;
    g_prev = gx;
  }
  EquilibriumResult out = finish(best, beta, C, curve, s, cc);
  out.iterations = best_root.iterations;
  out.bracket_lo = best_root.lo;
  out.bracket_hi = best_root.hi;
  out.multiple_roots = roots > 1;
  return out;
}

EquilibriumResult solve_window(const HourWindow& window, double C, const CorrectedCostCurve& curve,
                               double s, double cc, const EquilibriumOptions& options) {
  return solve_window(window.beta, C, curve, s, cc, options);
}

std::vector<TraceRow> demand_supply_trace(const HourWindow& window, double C,
                                          const CorrectedCostCurve& curve, double s, double cc,
                                          std::span<const double> delay_grid) {
  check_inputs(window.beta, C, s, cc);
  if (!(window.beta > 0.0)) fail_validation("trace needs beta > 0");
  if (delay_grid.empty()) fail_validation("trace delay grid is empty");
  std::vector<TraceRow> rows;
  rows.reserve(delay_grid.size());
  for (double delay : delay_grid) {
    require_finite(delay, "trace delay");
    TraceRow row;
    row.delay = delay;
    row.demand = operate_probability(curve(delay), s);
    const double arg = delay / kDelayScale + cc;
    if (arg > 0.0) {
      row.supply = (C / window.beta) * std::log(arg);
    } else {
      row.supply = std::numeric_limits<double>::quiet_NaN();
      row.in_domain = false;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace aircap
