#pragma once

// Scalar numerical building blocks shared by the model: bracketing root
// finding, golden-section maximisation, Gauss-Legendre rules, simple
// regression and a deterministic parallel loop.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace aircap {

struct RootOptions {
  double x_tol = 1e-10;   // absolute bracket tolerance
  double f_tol = 1e-9;    // required |f| at the returned point
  int max_iterations = 300;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  bool converged = false;
};

/// Brent's method (inverse quadratic / secant / bisection) on a bracket with
/// f(a) and f(b) of opposite sign. Stops when the bracket is within x_tol
/// and |f| <= f_tol; if the residual is still too large it keeps shrinking
/// down to machine precision.
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      const RootOptions& opt = {}) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  RootResult out;
  if (fa == 0.0) {
    out = {a, fa, 0, a, a, true};
    return out;
  }
  if (fb == 0.0) {
    out = {b, fb, 0, b, b, true};
    return out;
  }
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  double tol = opt.x_tol;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (fb == 0.0) {
      out = {b, fb, iter, b, b, true};
      return out;
    }
    if (std::abs(xm) <= tol1) {
      if (std::abs(fb) <= opt.f_tol) {
        out = {b, fb, iter, std::min(b, c), std::max(b, c), true};
        return out;
      }
      if (tol > 0.0) {
        tol = 0.0;
        tol1 = 2.0 * kEps * std::abs(b);
      }
      if (std::abs(xm) <= 2.0 * kEps * std::abs(b) + std::numeric_limits<double>::min()) {
        out = {b, fb, iter, std::min(b, c), std::max(b, c), false};
        return out;
      }
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
    out.iterations = iter;
  }
  out.x = b;
  out.fx = fb;
  out.lo = std::min(b, c);
  out.hi = std::max(b, c);
  out.converged = false;
  return out;
}

struct MaxResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Golden-section search for a maximum of a unimodal f on [a, b], stopping
/// once the bracket is narrower than `tol`.
template <class F>
MaxResult golden_section_maximize(F&& f, double a, double b, double tol,
                                  int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int iter = 0;
  while (std::abs(b - a) > tol && iter < max_iterations) {
    ++iter;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) return {c, fc, iter};
  return {d, fd, iter};
}

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule of order n. Orders that are powers of two between 16
/// and 512 are cached; other orders are computed on demand.
const GaussRule& gauss_legendre(int n);

/// Standard normal quantile function.
double normal_quantile(double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  friend bool operator==(const LinearFit&, const LinearFit&) = default;
};

/// Ordinary least-squares line. Throws a validation error when x is constant.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Coefficient of determination of predictions against observations.
double r_squared(std::span<const double> observed, std::span<const double> predicted);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written by index so the outcome does not depend on scheduling. The first
/// exception thrown by any worker is re-thrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace aircap
