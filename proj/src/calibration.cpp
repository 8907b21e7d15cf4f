#include "aircap/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "aircap/error.hpp"

namespace aircap {
namespace {

constexpr std::size_t kMinRegressionPairs = 50;
constexpr std::size_t kMinRecords = 30;
constexpr int kCapacityScanPoints = 200;
constexpr double kBetaTolerance = 1e-8;     // flights/h
constexpr double kBetaCapFactor = 1e6;

bool in_day(int hour) { return hour >= kFirstHour && hour <= kLastHour; }

double sse_for_capacity(std::span<const TrafficDelayPoint> pts, double C, double& cc) {
  double sum = 0.0;
  for (const auto& p : pts) sum += std::exp(p.traffic / C) - p.mean_delay / kDelayScale;
  cc = sum / static_cast<double>(pts.size());
  double sse = 0.0;
  for (const auto& p : pts) {
    const double r = kDelayScale * (std::exp(p.traffic / C) - cc) - p.mean_delay;
    sse += r * r;
  }
  return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

template <class F>
auto run_stage(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    rethrow_with_stage(e, stage);
  }
}

}  // namespace

void AirportFinancials::validate() const {
  const std::pair<double, const char*> fields[] = {
      {total_flights, "total_flights"},
      {total_passengers, "total_passengers"},
      {total_aero_revenue, "total_aero_revenue"},
      {total_non_aero_revenue, "total_non_aero_revenue"},
      {total_operating_cost, "total_operating_cost"},
      {period_days, "period_days"},
      {value_of_time, "value_of_time"}};
  for (const auto& [value, name] : fields) {
    require_finite(value, name);
    if (value < 0.0) fail_validation(std::string(name) + " must be >= 0");
  }
  if (period_days < 1.0) fail_validation("period_days must be >= 1");
}

DirectCalibration direct_calibrate(const AirportFinancials& financials,
                                   std::span<const FlightRecord> records) {
  financials.validate();
  if (records.empty()) fail_validation("no flight records");
  if (!(financials.total_flights > 0.0)) fail_validation("total_flights must be > 0");
  if (!(financials.total_passengers > 0.0)) fail_validation("total_passengers must be > 0");

  DirectCalibration out;
  out.n_f = financials.total_passengers / financials.total_flights;
  out.P = financials.total_aero_revenue / financials.total_flights;
  out.w_init = financials.total_non_aero_revenue / financials.total_passengers;
  out.c_init = financials.total_operating_cost / (financials.period_days * kWindowCount);
  out.v = financials.value_of_time;

  double root_sum = 0.0;
  std::set<std::string> dates;
  std::array<std::size_t, kWindowCount> counts{};
  for (const FlightRecord& r : records) {
    if (!(r.mtow_t > 0.0)) fail_validation("record mtow must be > 0");
    root_sum += std::sqrt(r.mtow_t);
    dates.insert(r.date);
    if (in_day(r.hour)) ++counts[static_cast<std::size_t>(r.hour - kFirstHour)];
  }
  out.sqrt_mtow = root_sum / static_cast<double>(records.size());
  out.days = dates.size();

  std::vector<int> missing;
  for (int i = 0; i < kWindowCount; ++i) {
    if (counts[static_cast<std::size_t>(i)] == 0) missing.push_back(kFirstHour + i);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "no records in hour windows:";
    for (int h : missing) msg << ' ' << h;
    fail_validation(msg.str());
  }
  for (int i = 0; i < kWindowCount; ++i) {
    out.T_obs[static_cast<std::size_t>(i)] =
        static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(out.days);
  }
  return out;
}

std::vector<TrafficDelayPoint> hourly_traffic_delay(std::span<const FlightRecord> records) {
  struct Acc {
    std::size_t n = 0;
    double sum = 0.0;
  };
  std::map<std::pair<std::string, int>, Acc> groups;
  for (const FlightRecord& r : records) {
    if (!in_day(r.hour)) continue;
    Acc& a = groups[{r.date, r.hour}];
    ++a.n;
    a.sum += r.delay_min;
  }
  std::vector<TrafficDelayPoint> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    out.push_back({static_cast<double>(acc.n), acc.sum / static_cast<double>(acc.n)});
  }
  return out;
}

DelayCapacityFit fit_delay_capacity(std::span<const TrafficDelayPoint> points) {
  if (points.size() < kMinRegressionPairs) {
    fail_validation("delay-capacity fit needs at least " + std::to_string(kMinRegressionPairs) +
                    " (traffic, delay) pairs, got " + std::to_string(points.size()));
  }
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    require_finite(p.traffic, "traffic");
    require_finite(p.mean_delay, "mean delay");
    if (p.traffic < 0.0) fail_validation("traffic must be >= 0");
    t_min = std::min(t_min, p.traffic);
    t_max = std::max(t_max, p.traffic);
  }
  if (t_min == t_max) fail_validation("degenerate regressor: all traffic values are identical");

  // cc is linear given C, so profile it out and search over log C.
  const double u_lo = std::log(0.02 * t_max);
  const double u_hi = std::log(1e3 * t_max);
  std::vector<double> sse(kCapacityScanPoints);
  int best = 0;
  double cc_unused;
  for (int i = 0; i < kCapacityScanPoints; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / (kCapacityScanPoints - 1);
    sse[static_cast<std::size_t>(i)] = sse_for_capacity(points, std::exp(u), cc_unused);
    if (sse[static_cast<std::size_t>(i)] < sse[static_cast<std::size_t>(best)]) best = i;
  }
  if (best == 0 || best == kCapacityScanPoints - 1) {
    fail_numerical("delay-capacity fit diverged: capacity at the search bound");
  }
  const double step = (u_hi - u_lo) / (kCapacityScanPoints - 1);
  const auto refined = golden_section_maximize(
      [&](double u) {
        double cc;
        return -sse_for_capacity(points, std::exp(u), cc);
      },
      u_lo + step * (best - 1), u_lo + step * (best + 1), 1e-12);

  double C = std::exp(refined.x);
  double cc;
  double cost = sse_for_capacity(points, C, cc);

  // Gauss-Newton polish on (C, cc) jointly.
  for (int iter = 0; iter < 50 && cost > 0.0; ++iter) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(points.size()), 2);
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double e = std::exp(points[i].traffic / C);
      const auto k = static_cast<Eigen::Index>(i);
      r(k) = kDelayScale * (e - cc) - points[i].mean_delay;
      jac(k, 0) = -kDelayScale * e * points[i].traffic / (C * C);
      jac(k, 1) = -kDelayScale;
    }
    const Eigen::Vector2d delta = jac.colPivHouseholderQr().solve(-r);
    if (!delta.allFinite()) break;
    const double C_new = C + delta(0);
    const double cc_new = cc + delta(1);
    if (!(C_new > 0.0)) break;
    double trial = 0.0;
    for (const auto& p : points) {
      const double res = kDelayScale * (std::exp(p.traffic / C_new) - cc_new) - p.mean_delay;
      trial += res * res;
    }
    if (!(trial < cost)) break;
    C = C_new;
    cc = cc_new;
    cost = trial;
  }
  if (!(cc > 0.0)) fail_numerical("delay-capacity fit gave cc <= 0");

  DelayCapacityFit fit;
  fit.C = C;
  fit.cc = cc;
  fit.pairs = points.size();
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> pred;
  for (const auto& p : points) {
    x.push_back(p.traffic);
    y.push_back(p.mean_delay);
    pred.push_back(kDelayScale * (std::exp(p.traffic / C) - cc));
  }
  fit.r_squared = r_squared(y, pred);
  fit.linear = fit_line(x, y);
  return fit;
}

BetaCalibration post_calibrate_beta(double T_obs, double C, const CorrectedCostCurve& curve,
                                    double s, double cc, const EquilibriumOptions& options) {
  require_finite(T_obs, "T_obs");
  if (T_obs < 0.0) fail_validation("T_obs must be >= 0");
  BetaCalibration out;
  if (T_obs == 0.0) return out;

  auto realized = [&](double beta) {
    return solve_window(beta, C, curve, s, cc, options).realized_traffic;
  };
  const double at_obs = realized(T_obs);
  if (std::abs(at_obs - T_obs) <= kBetaTolerance) {
    out.beta = T_obs;
    out.realized_traffic = at_obs;
    return out;
  }
  auto h = [&](double beta) { return realized(beta) - T_obs; };
  double lo = T_obs;
  double h_lo = at_obs - T_obs;
  double hi = 2.0 * T_obs;
  double h_hi = h(hi);
  double best_traffic = std::max(at_obs, h_hi + T_obs);
  while (h_hi < 0.0) {
    if (hi >= kBetaCapFactor * T_obs) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "target traffic " << T_obs << " unreachable; max achievable traffic "
          << best_traffic << " for beta up to " << hi;
      fail_numerical(msg.str());
    }
    lo = hi;
    h_lo = h_hi;
    hi *= 2.0;
    h_hi = h(hi);
    best_traffic = std::max(best_traffic, h_hi + T_obs);
  }
  RootOptions ro;
  ro.x_tol = 1e-13 * hi;
  ro.f_tol = kBetaTolerance;
  const RootResult root = brent_root(h, lo, hi, h_lo, h_hi, ro);
  out.beta = root.x;
  out.realized_traffic = root.fx + T_obs;
  out.iterations = root.iterations;
  if (std::abs(out.realized_traffic - T_obs) > 100.0 * kBetaTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "beta search stalled with realized traffic " << out.realized_traffic
        << " against target " << T_obs;
    fail_numerical(msg.str());
  }
  return out;
}

namespace {

void post_calibrate_all(AirportModel& model, unsigned threads) {
  std::vector<double> betas(model.windows.size());
  parallel_for(model.windows.size(), threads, [&](std::size_t i) {
    const HourWindow& w = model.windows[i];
    betas[i] = run_stage("post-calibration (hour " + std::to_string(w.hour) + ")", [&] {
      return post_calibrate_beta(w.T_obs, model.params.C_init, model.curve, model.params.s,
                                 model.params.cc)
          .beta;
    });
  });
  for (std::size_t i = 0; i < betas.size(); ++i) model.windows[i].beta = betas[i];
}

}  // namespace

CalibratedAirport calibrate_airport(const AirportFinancials& financials,
                                    std::span<const FlightRecord> records,
                                    const CalibrationOptions& options) {
  if (!(options.s > 0.0) || !std::isfinite(options.s)) {
    fail_validation("smoothness s must be > 0");
  }
  options.coeffs.validate();
  CalibratedAirport out;

  const auto in_day_count = static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const FlightRecord& r) { return in_day(r.hour); }));
  if (in_day_count < kMinRecords) {
    fail_validation("stage 'direct calibration': insufficient samples: " +
                    std::to_string(in_day_count) + " flight records in hours 5-22, need at least " +
                    std::to_string(kMinRecords));
  }

  const DirectCalibration direct =
      run_stage("direct calibration", [&] { return direct_calibrate(financials, records); });

  out.capacity_fit = run_stage("delay-capacity fit", [&] {
    const auto pts = hourly_traffic_delay(records);
    return fit_delay_capacity(pts);
  });

  AirportParameters& p = out.model.params;
  p.n_f = direct.n_f;
  p.P = direct.P;
  p.w_init = direct.w_init;
  p.c_init = direct.c_init;
  p.sqrt_mtow = direct.sqrt_mtow;
  p.v = direct.v;
  p.C_init = out.capacity_fit.C;
  p.cc = out.capacity_fit.cc;
  p.s = options.s;
  run_stage("direct calibration", [&] {
    p.validate();
    return 0;
  });
  out.model.coeffs = options.coeffs;

  std::array<std::vector<double>, kWindowCount> delays;
  for (const FlightRecord& r : records) {
    if (in_day(r.hour)) delays[static_cast<std::size_t>(r.hour - kFirstHour)].push_back(r.delay_min);
  }
  out.window_fits.resize(kWindowCount);
  parallel_for(kWindowCount, options.threads, [&](std::size_t i) {
    out.window_fits[i] =
        run_stage("delay distribution (hour " + std::to_string(kFirstHour + static_cast<int>(i)) +
                      ")",
                  [&] { return fit_shifted_lognormal(delays[i]); });
  });
  out.model.windows.resize(kWindowCount);
  for (int i = 0; i < kWindowCount; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    HourWindow& w = out.model.windows[idx];
    w.hour = kFirstHour + i;
    w.T_obs = direct.T_obs[idx];
    w.delay_dist = out.window_fits[idx].dist;
    if (out.window_fits[idx].mean_mismatch) {
      out.warnings.push_back("hour " + std::to_string(w.hour) +
                             ": fitted lognormal mean differs from the sample mean by more than 5%");
    }
  }

  out.model.curve = run_stage("corrected cost curve", [&] {
    return build_corrected_curve(out.model.windows, 1.0, p.sqrt_mtow, out.model.coeffs);
  });
  for (const auto& w : out.model.curve.validation.warnings()) out.warnings.push_back(w);

  post_calibrate_all(out.model, options.threads);
  return out;
}

AirportModel recalibrate_smoothness(const AirportModel& model, double s, unsigned threads) {
  if (!(s > 0.0) || !std::isfinite(s)) fail_validation("smoothness s must be > 0");
  AirportModel out = model;
  out.params.s = s;
  post_calibrate_all(out, threads);
  return out;
}

}  // namespace aircap
