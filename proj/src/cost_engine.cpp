#include "aircap/cost_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "aircap/error.hpp"
#include "aircap/numerics.hpp"

namespace aircap {
namespace {

constexpr std::size_t kMinSamples = 30;
constexpr int kThetaScanPoints = 120;
constexpr double kQuadratureRelTol = 1e-8;
constexpr int kQuadratureFirstOrder = 16;
constexpr int kQuadratureMaxOrder = 512;
constexpr double kNormalCutoff = 10.0;  // phi(10) ~ 7.7e-23
constexpr int kDesiderataGrid = 401;
constexpr double kDesiderataRelTol = 1e-6;
constexpr double kMaxExponent = 700.0;
constexpr double kFsSpan = 0.1;  // f * s' ranges over [1, 1 + kFsSpan]

// Negative profile log-likelihood of theta = x_min - exp(u), up to constants.
double profile_nll(std::span<const double> x, double x_min, double u) {
  const double theta = x_min - std::exp(u);
  const double n = static_cast<double>(x.size());
  double sum_log = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    const double l = std::log(v - theta);
    sum_log += l;
    sum_sq += l * l;
  }
  const double mean = sum_log / n;
  const double var = std::max(sum_sq / n - mean * mean, std::numeric_limits<double>::min());
  return sum_log + 0.5 * n * std::log(var);
}

struct LogMoments {
  double mu = 0.0;
  double sigma = 0.0;
  double sum_log = 0.0;
};

LogMoments log_moments(std::span<const double> x, double theta) {
  LogMoments m;
  for (double v : x) m.sum_log += std::log(v - theta);
  const double n = static_cast<double>(x.size());
  m.mu = m.sum_log / n;
  double ss = 0.0;
  for (double v : x) {
    const double d = std::log(v - theta) - m.mu;
    ss += d * d;
  }
  m.sigma = std::sqrt(ss / n);
  return m;
}

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Weights of the two branches of the blend, computed without cancellation.
void blend_weights(double x, double s_prime, double& w_lo, double& w_hi) {
  const double t = 2.0 * x / s_prime;
  if (t > 0.0) {
    const double e = std::exp(-t);
    w_lo = e / (1.0 + e);
    w_hi = 1.0 / (1.0 + e);
  } else {
    const double e = std::exp(t);
    w_lo = 1.0 / (1.0 + e);
    w_hi = e / (1.0 + e);
  }
}

// Internal fit parametrisation: c = e^a, d = e^b, s' = e^q,
// f = (1 + kFsSpan sigmoid(r)) / s'. With f * s' >= 1 the blend cannot dip
// just below zero delay (where the raw cost is flat); keeping f * s' close
// to 1 makes the low-delay excess die out like exp(-0.9 x / s'), so the
// curve rejoins the raw cost quickly above the data.
struct BlendParams {
  double a = 0.0;
  double b = 0.0;
  double q = 0.0;
  double r = 0.0;
};

double sigmoid(double r) { return 1.0 / (1.0 + std::exp(-r)); }

struct Natural {
  double c, d, f, s_prime;
};

Natural to_natural(const BlendParams& p) {
  const double s_prime = std::exp(p.q);
  return {std::exp(p.a), std::exp(p.b), (1.0 + kFsSpan * sigmoid(p.r)) / s_prime, s_prime};
}

class BlendProblem {
 public:
  BlendProblem(std::span<const CurvePoint> points, double sqrt_mtow, const CostCoefficients& coeffs)
      : points_(points), sqrt_mtow_(sqrt_mtow), coeffs_(coeffs) {
    for (const auto& pt : points_) scale_ = std::max(scale_, std::abs(pt.expected_cost));
    if (scale_ == 0.0) scale_ = 1.0;
    raw_.reserve(points_.size());
    for (const auto& pt : points_) raw_.push_back(raw_cost_of_delay(pt.mean_delay, sqrt_mtow_, coeffs_));
  }

  [[nodiscard]] std::size_t size() const { return points_.size(); }

  // Normalised residuals and optional Jacobian.
  double evaluate(const BlendParams& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const Natural nat = to_natural(p);
    const double sig = sigmoid(p.r);
    const std::size_t n = points_.size();
    r.resize(static_cast<Eigen::Index>(n));
    if (jac) jac->resize(static_cast<Eigen::Index>(n), 4);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = points_[i].mean_delay;
      double w_lo;
      double w_hi;
      blend_weights(x, nat.s_prime, w_lo, w_hi);
      const double ex = std::exp(std::min(nat.f * x, kMaxExponent));
      const double low = nat.c + nat.d * ex;
      const double model = w_lo * low + w_hi * raw_[i];
      const auto k = static_cast<Eigen::Index>(i);
      r(k) = (model - points_[i].expected_cost) / scale_;
      cost += r(k) * r(k);
      if (jac) {
        (*jac)(k, 0) = w_lo * nat.c / scale_;
        (*jac)(k, 1) = w_lo * nat.d * ex / scale_;
        const double dw_dq = w_lo * w_hi * 2.0 * x / nat.s_prime;
        (*jac)(k, 2) = (dw_dq * (low - raw_[i]) - w_lo * nat.d * ex * x * nat.f) / scale_;
        (*jac)(k, 3) = w_lo * nat.d * ex * x * kFsSpan * sig * (1.0 - sig) / nat.s_prime / scale_;
      }
    }
    return 0.5 * cost;
  }

 private:
  std::span<const CurvePoint> points_;
  double sqrt_mtow_;
  CostCoefficients coeffs_;
  std::vector<double> raw_;
  double scale_ = 0.0;
};

BlendParams clamp_params(BlendParams p, double range) {
  p.a = std::clamp(p.a, -kMaxExponent, kMaxExponent);
  p.b = std::clamp(p.b, -kMaxExponent, kMaxExponent);
  p.q = std::clamp(p.q, std::log(range * 1e-6), std::log(range * 1e6));
  p.r = std::clamp(p.r, -40.0, 40.0);
  return p;
}

struct FitOutcome {
  BlendParams params;
  double cost = std::numeric_limits<double>::infinity();
};

FitOutcome levenberg_marquardt(const BlendProblem& problem, BlendParams start, double range) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  BlendParams p = clamp_params(start, range);
  double cost = problem.evaluate(p, r, &jac);
  double lambda = 1e-3;
  for (int iter = 0; iter < 1000; ++iter) {
    const Eigen::Matrix4d a = jac.transpose() * jac;
    const Eigen::Vector4d g = jac.transpose() * r;
    bool accepted = false;
    while (lambda < 1e14) {
      Eigen::Matrix4d damped = a;
      for (int j = 0; j < 4; ++j) damped(j, j) += lambda * std::max(a(j, j), 1e-12);
      const Eigen::Vector4d step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      BlendParams trial{p.a + step(0), p.b + step(1), p.q + step(2), p.r + step(3)};
      trial = clamp_params(trial, range);
      Eigen::VectorXd r_trial;
      const double trial_cost = problem.evaluate(trial, r_trial, nullptr);
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double improvement = cost - trial_cost;
        p = trial;
        cost = problem.evaluate(p, r, &jac);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (improvement <= 1e-15 * std::max(cost, 1e-30) && step.norm() < 1e-10) {
          return {p, cost};
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  return {p, cost};
}

double param_norm(const Natural& n) {
  return std::sqrt(n.c * n.c + n.d * n.d + n.f * n.f + n.s_prime * n.s_prime);
}

}  // namespace

LogNormalFit fit_shifted_lognormal(std::span<const double> delays) {
  if (delays.size() < kMinSamples) {
    fail_validation("insufficient samples: need at least " + std::to_string(kMinSamples) +
                    ", got " + std::to_string(delays.size()));
  }
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : delays) {
    require_finite(v, "delay sample");
    x_min = std::min(x_min, v);
    x_max = std::max(x_max, v);
    sum += v;
  }
  const double range = x_max - x_min;
  if (!(range > 0.0)) fail_validation("degenerate distribution: all delay samples are equal");
  const double n = static_cast<double>(delays.size());
  const double sample_mean = sum / n;
  double ss = 0.0;
  for (double v : delays) ss += (v - sample_mean) * (v - sample_mean);

  LogNormalFit fit;
  fit.samples = delays.size();
  fit.sample_mean = sample_mean;
  fit.sample_sd = std::sqrt(ss / (n - 1.0));

  // Scan u = ln(x_min - theta) and keep the best interior local minimum of
  // the profile likelihood. The likelihood is unbounded as theta -> x_min,
  // so only interior minima are meaningful.
  const double span = std::max(range, 1.0);
  const double u_lo = std::log(1e-4 * span);
  const double u_hi = std::log(1e2 * span);
  std::array<double, kThetaScanPoints> us{};
  std::array<double, kThetaScanPoints> nll{};
  for (int i = 0; i < kThetaScanPoints; ++i) {
    us[i] = u_lo + (u_hi - u_lo) * i / (kThetaScanPoints - 1);
    nll[i] = profile_nll(delays, x_min, us[i]);
  }
  int best = -1;
  for (int i = 1; i + 1 < kThetaScanPoints; ++i) {
    if (nll[i] < nll[i - 1] && nll[i] <= nll[i + 1] && (best < 0 || nll[i] < nll[best])) best = i;
  }
  double theta;
  if (best >= 0) {
    const auto refined = golden_section_maximize(
        [&](double u) { return -profile_nll(delays, x_min, u); }, us[best - 1], us[best + 1],
        1e-9);
    theta = x_min - std::exp(refined.x);
    fit.profile_theta = true;
  } else if (nll[kThetaScanPoints - 1] < nll[0]) {
    // Likelihood keeps improving as theta -> -inf: the data look normal.
    theta = x_min - std::exp(u_hi);
    fit.profile_theta = true;
  } else {
    theta = x_min - std::max(1.0, 0.01 * range);
    fit.profile_theta = false;
  }

  const LogMoments m = log_moments(delays, theta);
  fit.dist = {m.mu, m.sigma, theta};
  fit.dist.validate();
  fit.log_likelihood = -(m.sum_log + n * std::log(m.sigma) + 0.5 * n +
                         0.5 * n * std::log(2.0 * std::numbers::pi));
  const double tolerance = 0.05 * std::max(std::abs(sample_mean), fit.sample_sd);
  fit.mean_mismatch = std::abs(fit.dist.mean() - sample_mean) > tolerance;
  return fit;
}

ShiftedLogNormal scale_sigma(const ShiftedLogNormal& dist, double k) {
  dist.validate();
  if (!(k > 0.0 && k <= 1.0)) fail_validation("sigma scale k must lie in (0, 1]");
  if (k == 1.0) return dist;
  const double s2 = dist.sigma * dist.sigma;
  const double new_s2 = std::log1p(k * k * std::expm1(s2));
  if (!(new_s2 > 0.0)) fail_validation("sigma scale k is too small to represent");
  ShiftedLogNormal out;
  out.sigma = std::sqrt(new_s2);
  out.mu = dist.mu + 0.5 * s2 - 0.5 * new_s2;
  out.theta = dist.theta;
  return out;
}

QuadratureResult expected_cost_detailed(const ShiftedLogNormal& dist, double sqrt_mtow,
                                        const CostCoefficients& coeffs) {
  dist.validate();
  require_finite(sqrt_mtow, "sqrt_mtow");
  const double lin = coeffs.linear(sqrt_mtow);
  const double quad = coeffs.quadratic(sqrt_mtow);

  // z-domain: delay = theta + exp(mu + sigma z). Only delay >= 0 costs
  // anything, so integrate from the z that maps to delay = 0.
  double z_lo = -kNormalCutoff;
  const double z_hi = 2.0 * dist.sigma + kNormalCutoff;
  if (dist.theta < 0.0) {
    const double z0 = (std::log(-dist.theta) - dist.mu) / dist.sigma;
    z_lo = std::max(z_lo, z0);
  }
  QuadratureResult out;
  if (!(z_lo < z_hi)) {
    out.order = 0;
    return out;
  }
  const double half = 0.5 * (z_hi - z_lo);
  const double mid = 0.5 * (z_hi + z_lo);
  auto integrate = [&](int order, double& abs_integral) {
    const GaussRule& rule = gauss_legendre(order);
    double sum = 0.0;
    abs_integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = mid + half * rule.nodes[i];
      const double x = std::max(dist.theta + std::exp(dist.mu + dist.sigma * z), 0.0);
      const double g = (lin * x + quad * x * x) * std_normal_pdf(z);
      sum += rule.weights[i] * g;
      abs_integral += rule.weights[i] * std::abs(g);
    }
    abs_integral *= half;
    return sum * half;
  };
  double abs_prev = 0.0;
  double prev = integrate(kQuadratureFirstOrder, abs_prev);
  for (int order = 2 * kQuadratureFirstOrder; order <= kQuadratureMaxOrder; order *= 2) {
    double abs_cur = 0.0;
    const double cur = integrate(order, abs_cur);
    const double change = std::abs(cur - prev);
    if (change <= kQuadratureRelTol * std::max(std::abs(cur), abs_cur) || change == 0.0) {
      out.value = cur;
      out.order = order;
      out.last_change = change;
      return out;
    }
    prev = cur;
  }
  std::ostringstream msg;
  msg.precision(12);
  msg << "expected-cost quadrature did not converge at order " << kQuadratureMaxOrder
      << " (mu=" << dist.mu << ", sigma=" << dist.sigma << ", theta=" << dist.theta
      << ", last estimate=" << prev << ")";
  fail_numerical(msg.str());
}

double expected_cost(const ShiftedLogNormal& dist, double sqrt_mtow,
                     const CostCoefficients& coeffs) {
  return expected_cost_detailed(dist, sqrt_mtow, coeffs).value;
}

std::vector<std::string> CurveValidation::warnings() const {
  std::vector<std::string> out;
  if (!non_negative) out.emplace_back("corrected cost is negative somewhere on the range");
  if (!monotone) out.emplace_back("corrected cost decreases with mean delay somewhere");
  if (!above_raw) out.emplace_back("corrected cost falls below the uncorrected cost");
  if (!family_ordered) out.emplace_back("a more predictable curve lies above a less predictable one");
  return out;
}

double CorrectedCostCurve::raw(double mean_delay) const {
  return raw_cost_of_delay(mean_delay, sqrt_mtow, coeffs);
}

double CorrectedCostCurve::operator()(double x) const {
  double w_lo;
  double w_hi;
  blend_weights(x, s_prime, w_lo, w_hi);
  const double low = c + d * std::exp(std::min(f * x, kMaxExponent));
  // w_lo underflows to zero long before low could overflow.
  const double low_part = (w_lo == 0.0) ? 0.0 : w_lo * low;
  return low_part + w_hi * raw(x);
}

void CorrectedCostCurve::validate() const {
  const std::pair<double, const char*> fields[] = {
      {c, "curve c"}, {d, "curve d"}, {f, "curve f"}, {s_prime, "curve s_prime"},
      {sqrt_mtow, "curve sqrt_mtow"}};
  for (const auto& [value, name] : fields) require_finite(value, name);
  coeffs.validate();
  if (!(s_prime > 0.0)) fail_validation("curve s_prime must be > 0");
  if (!(f > 0.0)) fail_validation("curve f must be > 0");
}

double corrected_cost(const CorrectedCostCurve& curve, double mean_delay) {
  require_finite(mean_delay, "mean delay");
  return curve(mean_delay);
}

CurveValidation check_desiderata(const CorrectedCostCurve& curve) {
  CurveValidation v = curve.validation;
  v.non_negative = true;
  v.monotone = true;
  v.above_raw = true;
  double scale = 0.0;
  for (const auto& pt : curve.points) scale = std::max(scale, std::abs(pt.expected_cost));
  if (scale == 0.0) scale = 1.0;
  const double tol = kDesiderataRelTol * scale;
  double lo = curve.eval_lo();
  double hi = curve.eval_hi();
  if (!(hi > lo)) {
    lo = curve.x_min - 1.0;
    hi = curve.x_max + 1.0;
  }
  double prev = 0.0;
  for (int i = 0; i < kDesiderataGrid; ++i) {
    const double x = lo + (hi - lo) * i / (kDesiderataGrid - 1);
    const double value = curve(x);
    if (value < -tol) v.non_negative = false;
    if (i > 0 && value < prev - tol) v.monotone = false;
    if (value < curve.raw(x) - tol) v.above_raw = false;
    prev = value;
  }
  return v;
}

CorrectedCostCurve zero_cost_curve() {
  CorrectedCostCurve curve;
  curve.c = 0.0;
  curve.d = 0.0;
  curve.f = 1.0;
  curve.s_prime = 1.0;
  curve.coeffs = CostCoefficients::zero();
  curve.x_min = -1.0;
  curve.x_max = 1.0;
  return curve;
}

CorrectedCostCurve fit_corrected_curve(std::span<const CurvePoint> points, double sigma_scale,
                                       double sqrt_mtow, const CostCoefficients& coeffs) {
  if (points.size() < 4) fail_validation("corrected-cost fit needs at least 4 points");
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double y_max = 0.0;
  for (const auto& pt : points) {
    require_finite(pt.mean_delay, "curve point mean delay");
    require_finite(pt.expected_cost, "curve point expected cost");
    x_min = std::min(x_min, pt.mean_delay);
    x_max = std::max(x_max, pt.mean_delay);
    y_max = std::max(y_max, std::abs(pt.expected_cost));
  }
  const double range = x_max - x_min;
  if (!(range > 1e-9)) {
    fail_validation("corrected-cost fit needs mean delays spanning a non-degenerate range");
  }

  CorrectedCostCurve curve;
  curve.coeffs = coeffs;
  curve.sqrt_mtow = sqrt_mtow;
  curve.sigma_scale = sigma_scale;
  curve.x_min = x_min;
  curve.x_max = x_max;
  curve.points.assign(points.begin(), points.end());

  if (y_max == 0.0) {
    curve.c = 0.0;
    curve.d = 0.0;
    curve.s_prime = 0.5 * range;
    curve.f = 1.0 / range;
  } else {
    const BlendProblem problem(points, sqrt_mtow, coeffs);
    const auto lowest =
        std::min_element(points.begin(), points.end(), [](const auto& l, const auto& r) {
          return l.mean_delay < r.mean_delay;
        });
    const double c0 = std::max(lowest->expected_cost, 1e-6 * y_max);
    const double d0 = c0;
    const double s0 = 0.5 * range;

    FitOutcome best;
    Natural best_nat{};
    for (double d_factor : {1.0, 0.1}) {
      for (double s_factor : {1.0, 0.25}) {
        for (double fs : {0.5, 0.1}) {
          const double s_prime = s0 * s_factor;
          BlendParams start{std::log(c0), std::log(d0 * d_factor), std::log(s_prime),
                            std::log(fs / (1.0 - fs))};
          const FitOutcome outcome = levenberg_marquardt(problem, start, range);
          const Natural nat = to_natural(outcome.params);
          if (!std::isfinite(outcome.cost)) continue;
          const double tie = 1e-12 * std::max(best.cost, 1e-300);
          const bool better = !std::isfinite(best.cost) || outcome.cost < best.cost - tie;
          const bool tied = std::abs(outcome.cost - best.cost) <= tie &&
                            param_norm(nat) < param_norm(best_nat);
          if (better || tied) {
            best = outcome;
            best_nat = nat;
          }
        }
      }
    }
    if (!std::isfinite(best.cost)) fail_numerical("corrected-cost fit diverged for every start");
    curve.c = best_nat.c;
    curve.d = best_nat.d;
    curve.f = best_nat.f;
    curve.s_prime = best_nat.s_prime;
  }

  std::vector<double> observed;
  std::vector<double> predicted;
  double ss = 0.0;
  for (const auto& pt : points) {
    const double y = curve(pt.mean_delay);
    observed.push_back(pt.expected_cost);
    predicted.push_back(y);
    ss += (y - pt.expected_cost) * (y - pt.expected_cost);
  }
  curve.r_squared = r_squared(observed, predicted);
  curve.residual_norm = std::sqrt(ss);
  if (!std::isfinite(curve.residual_norm)) fail_numerical("corrected-cost fit diverged");
  curve.validation = check_desiderata(curve);
  return curve;
}

CorrectedCostCurve build_corrected_curve(std::span<const HourWindow> windows, double sigma_scale,
                                         double sqrt_mtow, const CostCoefficients& coeffs) {
  std::vector<CurvePoint> points;
  points.reserve(windows.size());
  for (const HourWindow& w : windows) {
    const ShiftedLogNormal scaled = scale_sigma(w.delay_dist, sigma_scale);
    points.push_back({w.delay_dist.mean(), expected_cost(scaled, sqrt_mtow, coeffs)});
  }
  return fit_corrected_curve(points, sigma_scale, sqrt_mtow, coeffs);
}

void validate_family(std::span<CorrectedCostCurve> curves) {
  for (auto& c : curves) c.validation.family_ordered = true;
  if (curves.size() < 2) return;
  std::vector<std::size_t> order(curves.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return curves[l].sigma_scale < curves[r].sigma_scale;
  });
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const auto& c : curves) {
    lo = std::max(lo, c.eval_lo());
    hi = std::min(hi, c.eval_hi());
    for (const auto& pt : c.points) scale = std::max(scale, std::abs(pt.expected_cost));
  }
  if (!(hi > lo)) return;
  if (scale == 0.0) scale = 1.0;
  const double tol = kDesiderataRelTol * scale;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    auto& smaller = curves[order[k]];
    auto& larger = curves[order[k + 1]];
    for (int i = 0; i < kDesiderataGrid; ++i) {
      const double x = lo + (hi - lo) * i / (kDesiderataGrid - 1);
      if (smaller(x) > larger(x) + tol) {
        smaller.validation.family_ordered = false;
        larger.validation.family_ordered = false;
        break;
      }
    }
  }
}

}  // namespace aircap
