#pragma once

// Versioned JSON persistence of calibrated airports. Doubles are written
// with round-trip precision, so save followed by load is exact.

#include <filesystem>

#include <json.hpp>

#include "aircap/calibration.hpp"

namespace aircap {

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json model_to_json(const CalibratedAirport& airport);
CalibratedAirport model_from_json(const nlohmann::json& doc);

void save_model(const CalibratedAirport& airport, const std::filesystem::path& path);
CalibratedAirport load_model(const std::filesystem::path& path);

nlohmann::json params_to_json(const AirportParameters& p);
nlohmann::json coeffs_to_json(const CostCoefficients& c);
/// Accepts a preset name ("published", "sign-swapped") or {a1, a2, b1, b2}.
CostCoefficients coeffs_from_json(const nlohmann::json& j);

}  // namespace aircap
