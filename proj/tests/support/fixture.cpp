#include "fixture.hpp"

namespace aircap::testing {

namespace {
constexpr double kTraffic[kWindowCount] = {12, 30, 36, 34, 30, 28, 30, 33, 31,
                                           28, 30, 34, 36, 33, 28, 24, 18, 10};
}

SyntheticAirportSpec fixture_spec() {
  SyntheticAirportSpec s;
  s.name = "fixture";
  s.seed = 11;
  s.days = 200;
  s.capacity = 250.0;
  s.cc = 1.05;
  for (int i = 0; i < kWindowCount; ++i) {
    s.traffic[i] = kTraffic[i];
    s.delay_sd[i] = 15.0;
    s.theta[i] = -15.0;
  }
  s.n_f = 120.0;
  s.P = 1500.0;
  s.w = 12.0;
  s.c_init = 50000.0;
  s.coeffs = CostCoefficients::sign_swapped();
  s.mtow_t = {72.25};
  return s;
}

const SyntheticAirport& fixture_airport() {
  static const SyntheticAirport airport = generate_synthetic(fixture_spec());
  return airport;
}

const CalibratedAirport& fixture_calibrated() {
  static const CalibratedAirport cal = [] {
    const SyntheticAirport& a = fixture_airport();
    CalibrationOptions opts;
    opts.coeffs = CostCoefficients::sign_swapped();
    return calibrate_airport(a.financials, a.records, opts);
  }();
  return cal;
}

SyntheticAirportSpec small_spec() {
  SyntheticAirportSpec s = fixture_spec();
  s.name = "small";
  s.days = 30;
  return s;
}

}  // namespace aircap::testing
