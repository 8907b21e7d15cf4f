#include "aircap/model_io.hpp"

#include <cmath>
#include <limits>

#include "aircap/data_io.hpp"
#include "aircap/error.hpp"

namespace aircap {
namespace {

using nlohmann::json;

// JSON has no NaN/Inf; those are stored as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail_validation(std::string("field '") + key + "' is not a number");
}

json dist_to_json(const ShiftedLogNormal& d) {
  return {{"mu", num(d.mu)}, {"sigma", num(d.sigma)}, {"theta", num(d.theta)}};
}

ShiftedLogNormal dist_from_json(const json& j) {
  return {get(j, "mu"), get(j, "sigma"), get(j, "theta")};
}

json validation_to_json(const CurveValidation& v) {
  return {{"non_negative", v.non_negative},
          {"monotone", v.monotone},
          {"above_raw", v.above_raw},
          {"family_ordered", v.family_ordered}};
}

CurveValidation validation_from_json(const json& j) {
  CurveValidation v;
  v.non_negative = j.at("non_negative").get<bool>();
  v.monotone = j.at("monotone").get<bool>();
  v.above_raw = j.at("above_raw").get<bool>();
  v.family_ordered = j.at("family_ordered").get<bool>();
  return v;
}

json curve_to_json(const CorrectedCostCurve& c) {
  json points = json::array();
  for (const auto& p : c.points) points.push_back({num(p.mean_delay), num(p.expected_cost)});
  return {{"c", num(c.c)},
          {"d", num(c.d)},
          {"f", num(c.f)},
          {"s_prime", num(c.s_prime)},
          {"coeffs", coeffs_to_json(c.coeffs)},
          {"sqrt_mtow", num(c.sqrt_mtow)},
          {"sigma_scale", num(c.sigma_scale)},
          {"r_squared", num(c.r_squared)},
          {"residual_norm", num(c.residual_norm)},
          {"x_min", num(c.x_min)},
          {"x_max", num(c.x_max)},
          {"points", points},
          {"validation", validation_to_json(c.validation)}};
}

CorrectedCostCurve curve_from_json(const json& j) {
  CorrectedCostCurve c;
  c.c = get(j, "c");
  c.d = get(j, "d");
  c.f = get(j, "f");
  c.s_prime = get(j, "s_prime");
  c.coeffs = coeffs_from_json(j.at("coeffs"));
  c.sqrt_mtow = get(j, "sqrt_mtow");
  c.sigma_scale = get(j, "sigma_scale");
  c.r_squared = get(j, "r_squared");
  c.residual_norm = get(j, "residual_norm");
  c.x_min = get(j, "x_min");
  c.x_max = get(j, "x_max");
  for (const auto& p : j.at("points")) {
    json pair = json::object({{"x", p.at(0)}, {"y", p.at(1)}});
    c.points.push_back({get(pair, "x"), get(pair, "y")});
  }
  c.validation = validation_from_json(j.at("validation"));
  c.validate();
  return c;
}

AirportParameters params_from_json(const json& j) {
  AirportParameters p;
  p.n_f = get(j, "n_f");
  p.P = get(j, "P");
  p.w_init = get(j, "w_init");
  p.C_init = get(j, "C_init");
  p.cc = get(j, "cc");
  p.c_init = get(j, "c_init");
  p.sqrt_mtow = get(j, "sqrt_mtow");
  p.s = get(j, "s");
  p.v = get(j, "v");
  p.validate();
  return p;
}

}  // namespace

json params_to_json(const AirportParameters& p) {
  return {{"n_f", num(p.n_f)},       {"P", num(p.P)},   {"w_init", num(p.w_init)},
          {"C_init", num(p.C_init)}, {"cc", num(p.cc)}, {"c_init", num(p.c_init)},
          {"sqrt_mtow", num(p.sqrt_mtow)}, {"s", num(p.s)}, {"v", num(p.v)}};
}

json coeffs_to_json(const CostCoefficients& c) {
  return {{"a1", num(c.a1)}, {"a2", num(c.a2)}, {"b1", num(c.b1)}, {"b2", num(c.b2)}};
}

CostCoefficients coeffs_from_json(const json& j) {
  try {
    if (j.is_string()) return CostCoefficients::preset(j.get<std::string>());
    for (const auto& [key, value] : j.items()) {
      if (key != "a1" && key != "a2" && key != "b1" && key != "b2") {
        fail_validation("unknown cost coefficient '" + key + "'");
      }
    }
    CostCoefficients c{get(j, "a1"), get(j, "a2"), get(j, "b1"), get(j, "b2")};
    c.validate();
    return c;
  } catch (const json::exception& e) {
    fail_validation(std::string("malformed cost coefficients: ") + e.what());
  }
}

json model_to_json(const CalibratedAirport& airport) {
  const AirportModel& m = airport.model;
  json windows = json::array();
  for (const HourWindow& w : m.windows) {
    windows.push_back({{"hour", w.hour},
                       {"T_obs", num(w.T_obs)},
                       {"beta", num(w.beta)},
                       {"delay_dist", dist_to_json(w.delay_dist)}});
  }
  json fits = json::array();
  for (const LogNormalFit& f : airport.window_fits) {
    fits.push_back({{"dist", dist_to_json(f.dist)},
                    {"samples", f.samples},
                    {"sample_mean", num(f.sample_mean)},
                    {"sample_sd", num(f.sample_sd)},
                    {"log_likelihood", num(f.log_likelihood)},
                    {"profile_theta", f.profile_theta},
                    {"mean_mismatch", f.mean_mismatch}});
  }
  const DelayCapacityFit& cf = airport.capacity_fit;
  return {{"schema_version", kModelSchemaVersion},
          {"params", params_to_json(m.params)},
          {"coeffs", coeffs_to_json(m.coeffs)},
          {"windows", windows},
          {"curve", curve_to_json(m.curve)},
          {"capacity_fit",
           {{"C", num(cf.C)},
            {"cc", num(cf.cc)},
            {"r_squared", num(cf.r_squared)},
            {"pairs", cf.pairs},
            {"linear",
             {{"slope", num(cf.linear.slope)},
              {"intercept", num(cf.linear.intercept)},
              {"r_squared", num(cf.linear.r_squared)}}}}},
          {"window_fits", fits},
          {"warnings", airport.warnings}};
}

CalibratedAirport model_from_json(const json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("schema_version")) {
      fail_validation("model file has no schema_version");
    }
    const int version = doc.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      fail_validation("unsupported model schema version " + std::to_string(version) +
                      " (expected " + std::to_string(kModelSchemaVersion) + ")");
    }
    CalibratedAirport out;
    AirportModel& m = out.model;
    m.params = params_from_json(doc.at("params"));
    m.coeffs = coeffs_from_json(doc.at("coeffs"));
    for (const auto& w : doc.at("windows")) {
      HourWindow hw;
      hw.hour = w.at("hour").get<int>();
      hw.T_obs = get(w, "T_obs");
      hw.beta = get(w, "beta");
      hw.delay_dist = dist_from_json(w.at("delay_dist"));
      m.windows.push_back(hw);
    }
    m.curve = curve_from_json(doc.at("curve"));
    const json& cf = doc.at("capacity_fit");
    out.capacity_fit.C = get(cf, "C");
    out.capacity_fit.cc = get(cf, "cc");
    out.capacity_fit.r_squared = get(cf, "r_squared");
    out.capacity_fit.pairs = cf.at("pairs").get<std::size_t>();
    const json& lin = cf.at("linear");
    out.capacity_fit.linear = {get(lin, "slope"), get(lin, "intercept"), get(lin, "r_squared")};
    for (const auto& f : doc.at("window_fits")) {
      LogNormalFit fit;
      fit.dist = dist_from_json(f.at("dist"));
      fit.samples = f.at("samples").get<std::size_t>();
      fit.sample_mean = get(f, "sample_mean");
      fit.sample_sd = get(f, "sample_sd");
      fit.log_likelihood = get(f, "log_likelihood");
      fit.profile_theta = f.at("profile_theta").get<bool>();
      fit.mean_mismatch = f.at("mean_mismatch").get<bool>();
      out.window_fits.push_back(fit);
    }
    out.warnings = doc.at("warnings").get<std::vector<std::string>>();
    m.validate();
    return out;
  } catch (const json::exception& e) {
    fail_validation(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const CalibratedAirport& airport, const std::filesystem::path& path) {
  write_json(model_to_json(airport), path);
}

CalibratedAirport load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace aircap
