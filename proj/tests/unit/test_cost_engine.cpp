#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "aircap/cost_engine.hpp"
#include "aircap/error.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

using namespace aircap;
using namespace aircap::testing;

namespace {

std::vector<double> draw(const ShiftedLogNormal& d, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> out(n);
  for (auto& x : out) x = d.theta + std::exp(d.mu + d.sigma * z(rng));
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("shifted lognormal fit recovers known parameters") {
  const ShiftedLogNormal truth{2.0, 0.5, -10.0};
  const auto xs = draw(truth, 100000, 42);
  const LogNormalFit fit = fit_shifted_lognormal(xs);
  CHECK(rel(fit.dist.mu, truth.mu) < 0.02);
  CHECK(rel(fit.dist.sigma, truth.sigma) < 0.02);
  CHECK(fit.samples == xs.size());
  CHECK(fit.dist.theta < *std::min_element(xs.begin(), xs.end()));
  CHECK_FALSE(fit.mean_mismatch);
}

TEST_CASE("shifted lognormal fit preconditions") {
  const std::vector<double> same(50, 4.0);
  CHECK_THROWS_WITH_AS(fit_shifted_lognormal(same), doctest::Contains("degenerate distribution"),
                       Error);
  const auto few = draw({1.0, 0.3, 0.0}, 10, 1);
  CHECK_THROWS_WITH_AS(fit_shifted_lognormal(few), doctest::Contains("insufficient samples"),
                       Error);
}

TEST_CASE("scale_sigma keeps the mean and scales the sd") {
  const ShiftedLogNormal d{2.0, 0.5, 0.0};
  CHECK(scale_sigma(d, 1.0) == d);

  const ShiftedLogNormal half = scale_sigma(d, 0.5);
  const auto xs = draw(half, 1000000, 9);
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  const double sd = std::sqrt(v / static_cast<double>(xs.size() - 1));
  CHECK(rel(m, d.mean()) < 0.002);
  CHECK(rel(sd, 0.5 * d.sd()) < 0.005);

  const ShiftedLogNormal tiny = scale_sigma(d, 1e-6);
  CHECK(tiny.sd() < 1e-5 * d.sd());
  CHECK(rel(tiny.mean(), d.mean()) < 1e-12);
  CHECK_THROWS_AS(scale_sigma(d, 0.0), Error);
  CHECK_THROWS_AS(scale_sigma(d, 1.5), Error);
}

TEST_CASE("scale_sigma preserves the mean for random distributions") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mu(0.5, 4.0);
  std::uniform_real_distribution<double> sg(0.1, 1.2);
  std::uniform_real_distribution<double> th(-40.0, 5.0);
  std::uniform_real_distribution<double> kk(0.01, 1.0);
  for (int i = 0; i < 200; ++i) {
    const ShiftedLogNormal d{mu(rng), sg(rng), th(rng)};
    const double k = kk(rng);
    const ShiftedLogNormal s = scale_sigma(d, k);
    CHECK(std::abs(s.mean() - d.mean()) <= 1e-10 * std::max(1.0, std::abs(d.mean())));
    CHECK(s.sd() == doctest::Approx(k * d.sd()).epsilon(1e-9));
    CHECK(s.theta == d.theta);
  }
}

TEST_CASE("expected cost point-mass limits") {
  const CostCoefficients k = CostCoefficients::sign_swapped();
  for (double m : {3.0, 12.0, 45.0}) {
    const ShiftedLogNormal d = scale_sigma({std::log(m + 15.0) - 0.02, 0.2, -15.0}, 1e-7);
    const double raw = raw_cost_of_delay(d.mean(), 8.5, k);
    CHECK(rel(expected_cost(d, 8.5, k), raw) < 1e-6);
  }
  const ShiftedLogNormal neg = scale_sigma({std::log(10.0) - 0.02, 0.2, -15.0}, 1e-7);
  REQUIRE(neg.mean() < 0.0);
  CHECK(expected_cost(neg, 8.5, k) == 0.0);
}

TEST_CASE("expected cost agrees with Monte Carlo") {
  const ShiftedLogNormal d{2.0, 0.8, -20.0};
  const CostCoefficients k;
  const QuadratureResult q = expected_cost_detailed(d, 0.0, k);
  const double mc = monte_carlo_expected_cost(d, 0.0, k, 10000000, 2024);
  CHECK(rel(q.value, mc) < 0.003);
  CHECK(q.order >= 16);
  CHECK(q.order <= 512);
}

TEST_CASE("expected cost is zero when all mass is early") {
  const ShiftedLogNormal d{0.5, 0.3, -30.0};
  CHECK(expected_cost(d, 8.5, CostCoefficients::sign_swapped()) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("curve fit recovers a known blend") {
  CorrectedCostCurve truth;
  truth.coeffs = CostCoefficients::sign_swapped();
  truth.sqrt_mtow = 8.5;
  truth.c = 60.0;
  truth.d = 25.0;
  truth.s_prime = 18.0;
  truth.f = 1.05 / truth.s_prime;
  std::vector<CurvePoint> pts;
  for (int i = 0; i < 18; ++i) {
    const double x = -8.0 + 2.0 * i;
    pts.push_back({x, truth(x)});
  }
  const CorrectedCostCurve fit = fit_corrected_curve(pts, 1.0, 8.5, truth.coeffs);
  double ymin = pts.front().expected_cost;
  double ymax = ymin;
  double sse = 0.0;
  for (const auto& p : pts) {
    ymin = std::min(ymin, p.expected_cost);
    ymax = std::max(ymax, p.expected_cost);
    sse += std::pow(fit(p.mean_delay) - p.expected_cost, 2);
  }
  const double rmse = std::sqrt(sse / pts.size());
  CHECK(rmse < 0.005 * (ymax - ymin));
  CHECK(fit.r_squared > 0.999);
}

TEST_CASE("fixture curve quality and asymptotes") {
  const CorrectedCostCurve& curve = fixture_calibrated().model.curve;
  CHECK(curve.r_squared > 0.95);
  CHECK(curve.validation.ok());
  CHECK(curve.s_prime > 0.0);
  CHECK(curve.f > 0.0);

  double ymax = 0.0;
  for (const auto& p : curve.points) ymax = std::max(ymax, std::abs(p.expected_cost));
  for (const auto& p : curve.points) {
    CHECK(std::abs(curve(p.mean_delay) - p.expected_cost) < 0.05 * ymax);
  }
  for (double x : {300.0, 600.0, 1200.0}) {
    CHECK(rel(curve(x), curve.raw(x)) < 0.01);
  }
  CHECK(curve(-1e4) == doctest::Approx(curve.c).epsilon(1e-9));
  CHECK(corrected_cost(curve, 7.0) == curve(7.0));
}

TEST_CASE("curve at vanishing spread follows the raw cost") {
  const AirportModel& m = fixture_calibrated().model;
  const CorrectedCostCurve c =
      build_corrected_curve(m.windows, 1e-3, m.params.sqrt_mtow, m.coeffs);
  for (const auto& p : c.points) {
    const double raw = c.raw(p.mean_delay);
    CHECK(std::abs(c(p.mean_delay) - raw) < 0.01 * std::max(raw, 1.0));
  }
}

TEST_CASE("curve family is ordered in k") {
  const AirportModel& m = fixture_calibrated().model;
  std::vector<CorrectedCostCurve> family;
  for (double k : {1.0, 0.6, 0.2}) {
    family.push_back(build_corrected_curve(m.windows, k, m.params.sqrt_mtow, m.coeffs));
  }
  validate_family(family);
  for (const auto& c : family) CHECK(c.validation.ok());
  for (double x = family[0].eval_lo(); x <= family[0].eval_hi(); x += 0.5) {
    CHECK(family[1](x) <= family[0](x) + 1e-6 * family[0](x) + 1e-9);
    CHECK(family[2](x) <= family[1](x) + 1e-6 * family[1](x) + 1e-9);
  }
}

TEST_CASE("zero cost curve and validation") {
  const CorrectedCostCurve z = zero_cost_curve();
  for (double x : {-50.0, 0.0, 10.0, 400.0}) CHECK(z(x) == 0.0);
  CorrectedCostCurve bad = z;
  bad.s_prime = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = z;
  bad.f = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("desiderata flags catch a broken curve") {
  CorrectedCostCurve c = fixture_calibrated().model.curve;
  c.c = -500.0;
  const CurveValidation v = check_desiderata(c);
  CHECK_FALSE(v.non_negative);
  CHECK_FALSE(v.ok());
  CHECK_FALSE(v.warnings().empty());
}
