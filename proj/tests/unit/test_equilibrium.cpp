#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "aircap/equilibrium.hpp"
#include "aircap/error.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

using namespace aircap;
using namespace aircap::testing;

TEST_CASE("zero-cost curve gives the delay law at full demand") {
  const CorrectedCostCurve z = zero_cost_curve();
  for (double beta : {5.0, 20.0, 38.0}) {
    const EquilibriumResult r = solve_window(beta, 40.0, z, 500.0, 1.0);
    CHECK(r.mean_delay == doctest::Approx(delay_from_traffic(beta, 40.0, 1.0)).epsilon(1e-9));
    CHECK(r.operate_prob == 1.0);
    CHECK(r.realized_traffic == beta);
  }
}

TEST_CASE("zero potential demand gives zero traffic") {
  const EquilibriumResult r = solve_window(0.0, 40.0, fixture_calibrated().model.curve, 500, 1.0);
  CHECK(r.realized_traffic == 0.0);
}

TEST_CASE("fixture window matches a dense bisection oracle") {
  const CorrectedCostCurve& curve = fixture_calibrated().model.curve;
  const EquilibriumResult r = solve_window(35.0, 40.0, curve, 500.0, 1.0);
  const BisectionRoot o = bisection_equilibrium(35.0, 40.0, curve, 500.0, 1.0, -119.9, 400.0, 1000000);
  CHECK(o.sign_changes == 1);
  CHECK(std::abs(r.mean_delay - o.delay) < 1e-6);
}

TEST_CASE("equilibrium result invariants over random windows") {
  const CorrectedCostCurve& curve = fixture_calibrated().model.curve;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> beta(0.5, 80.0);
  std::uniform_real_distribution<double> cap(10.0, 300.0);
  std::uniform_real_distribution<double> ccd(0.9, 1.2);
  std::uniform_real_distribution<double> sd(100.0, 2000.0);
  for (int i = 0; i < 200; ++i) {
    const double b = beta(rng);
    const double C = cap(rng);
    const double cc = ccd(rng);
    const double s = sd(rng);
    const EquilibriumResult r = solve_window(b, C, curve, s, cc);
    CHECK(std::abs(r.residual) <= 1e-9);
    CHECK(r.realized_traffic == r.operate_prob * b);
    const double supply = traffic_from_delay(r.mean_delay, C, cc);
    CHECK(std::abs(supply - r.realized_traffic) <= 1e-6 * std::max(1.0, r.realized_traffic));
    CHECK_FALSE(r.multiple_roots);
    CHECK(r.bracket_lo <= r.mean_delay);
    CHECK(r.mean_delay <= r.bracket_hi);

    EquilibriumOptions wide;
    wide.bracket_scale = 37.0;
    const EquilibriumResult r2 = solve_window(b, C, curve, s, cc, wide);
    CHECK(std::abs(r2.mean_delay - r.mean_delay) < 1e-8);
  }
}

TEST_CASE("solve_window rejects bad inputs") {
  const CorrectedCostCurve z = zero_cost_curve();
  CHECK_THROWS_AS(solve_window(-1.0, 40.0, z, 500, 1.0), Error);
  CHECK_THROWS_AS(solve_window(10.0, 0.0, z, 500, 1.0), Error);
  CHECK_THROWS_AS(solve_window(10.0, 40.0, z, 0.0, 1.0), Error);
  EquilibriumOptions o;
  o.bracket_scale = 0.0;
  CHECK_THROWS_AS(solve_window(10.0, 40.0, z, 500, 1.0, o), Error);
}

TEST_CASE("demand-supply trace") {
  const AirportModel& m = fixture_calibrated().model;
  HourWindow w = m.windows[6];
  const double C = 40.0;
  const EquilibriumResult eq = solve_window(w, C, m.curve, m.params.s, m.params.cc);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-4.0 + 0.1 * i);
  const auto rows = demand_supply_trace(w, C, m.curve, m.params.s, m.params.cc, grid);
  REQUIRE(rows.size() == grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].in_domain);
    CHECK(rows[i].supply > rows[i - 1].supply);
    CHECK(rows[i].demand <= rows[i - 1].demand);
  }
  const std::vector<double> at = {eq.mean_delay};
  const TraceRow root = demand_supply_trace(w, C, m.curve, m.params.s, m.params.cc, at)[0];
  CHECK(std::abs(root.demand - root.supply) <= 1e-9);

  const std::vector<double> out = {-200.0};
  const TraceRow o = demand_supply_trace(w, C, m.curve, m.params.s, m.params.cc, out)[0];
  CHECK_FALSE(o.in_domain);
  CHECK(std::isnan(o.supply));
}
