#pragma once

// Synthetic airports with known ground truth, for calibration round trips.
// Each window has an integer-or-fractional mean departure count per day;
// its mean delay follows the delay-traffic law and its delays a shifted
// lognormal with the given standard deviation and shift.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aircap/calibration.hpp"

namespace aircap {

struct SyntheticAirportSpec {
  std::string name = "synthetic";
  std::uint64_t seed = 1;
  int days = 30;
  double capacity = 40.0;
  double cc = 1.0;
  std::array<double, kWindowCount> traffic{};  // departures per window per day
  std::array<double, kWindowCount> delay_sd{};
  std::array<double, kWindowCount> theta{};
  double n_f = 100.0;
  double P = 1000.0;
  double w = 10.0;
  double c_init = 50000.0;  // EUR/h
  double s = 500.0;
  double value_of_time = 0.0;
  CostCoefficients coeffs;
  std::vector<double> mtow_t = {77.0};
  double traffic_noise = 0.0;  // relative sd of per-slot departure counts
  double delay_noise = 0.0;    // relative sd of a per-slot delay multiplier
  std::optional<long long> record_count;  // keep only the first N records

  void validate() const;
  [[nodiscard]] bool noiseless() const { return traffic_noise == 0.0 && delay_noise == 0.0; }
  /// True shifted lognormal of a window (mean from the delay-traffic law).
  [[nodiscard]] ShiftedLogNormal window_distribution(int window_index) const;
};

SyntheticAirportSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json synthetic_spec_to_json(const SyntheticAirportSpec& spec);

struct SyntheticAirport {
  std::vector<FlightRecord> records;
  AirportFinancials financials;
  AirportModel truth;  // true parameters, distributions, curve and beta
};

SyntheticAirport generate_synthetic(const SyntheticAirportSpec& spec);

/// Ground-truth model only (no records): true windows, the corrected cost
/// curve at sigma-scale 1 and beta post-calibrated to the window traffic.
AirportModel ground_truth_model(const SyntheticAirportSpec& spec, double sqrt_mtow);

std::string records_to_csv(const std::vector<FlightRecord>& records);
std::string financials_to_text(const AirportFinancials& f);
nlohmann::json manifest_json(const SyntheticAirportSpec& spec, const SyntheticAirport& airport);

/// Writes records.csv, financials.txt and manifest.json into dir.
void write_synthetic(const SyntheticAirportSpec& spec, const SyntheticAirport& airport,
                     const std::filesystem::path& dir);

}  // namespace aircap
