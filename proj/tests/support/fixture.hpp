#pragma once

// Shared synthetic airport used across unit and acceptance tests. Delay
// capacity is high relative to traffic, the fleet is a single type with
// sqrt(MTOW) = 8.5 and the sign-swapped cost coefficients are used, so the
// effective coefficients are positive and the curve family validates.

#include "aircap/calibration.hpp"
#include "aircap/synthetic.hpp"

namespace aircap::testing {

SyntheticAirportSpec fixture_spec();

/// Generated records for fixture_spec(), built once per process.
const SyntheticAirport& fixture_airport();

/// calibrate_airport on fixture_airport(), built once per process.
const CalibratedAirport& fixture_calibrated();

/// A smaller airport (30 days) for tests that only need a valid model.
SyntheticAirportSpec small_spec();

}  // namespace aircap::testing
