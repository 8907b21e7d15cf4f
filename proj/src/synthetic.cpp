#include "aircap/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "aircap/data_io.hpp"
#include "aircap/error.hpp"
#include "aircap/model_io.hpp"

namespace aircap {
namespace {

using nlohmann::json;

// Uniform draws from the raw 64-bit stream so output does not depend on the
// standard library's distribution implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // in (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() { return normal_quantile(uniform()); }
  std::size_t index(std::size_t n) {
    return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
  }

 private:
  std::mt19937_64 engine_;
};

std::string date_string(int day_offset) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2024} / January / 1} + days{day_offset}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

template <class T>
T read(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::array<double, kWindowCount> per_window(const json& j, const char* key, double fallback) {
  std::array<double, kWindowCount> out;
  out.fill(fallback);
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (v.is_number()) {
    out.fill(v.get<double>());
  } else {
    const auto values = v.get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(kWindowCount)) {
      fail_validation(std::string("'") + key + "' needs a number or " +
                      std::to_string(kWindowCount) + " values");
    }
    std::copy(values.begin(), values.end(), out.begin());
  }
  return out;
}

}  // namespace

void SyntheticAirportSpec::validate() const {
  if (days < 1) fail_validation("synthetic spec: days must be >= 1");
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    fail_validation("synthetic spec: capacity must be > 0");
  }
  if (!(cc > 0.0) || !std::isfinite(cc)) fail_validation("synthetic spec: cc must be > 0");
  for (int i = 0; i < kWindowCount; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(traffic[k] >= 0.0) || !std::isfinite(traffic[k])) {
      fail_validation("synthetic spec: traffic must be finite and >= 0");
    }
    if (!(delay_sd[k] > 0.0) || !std::isfinite(delay_sd[k])) {
      fail_validation("synthetic spec: delay_sd must be > 0");
    }
    require_finite(theta[k], "synthetic spec theta");
    // The smallest mean delay (no traffic) must stay above the shift.
    if (!(kDelayScale * (1.0 - cc) > theta[k])) {
      fail_validation("synthetic spec: theta must lie below the zero-traffic delay 120*(1-cc)");
    }
  }
  AirportParameters p;
  p.n_f = n_f;
  p.P = P;
  p.w_init = w;
  p.C_init = capacity;
  p.cc = cc;
  p.c_init = c_init;
  p.s = s;
  p.v = value_of_time;
  p.validate();
  coeffs.validate();
  if (mtow_t.empty()) fail_validation("synthetic spec: mtow_t must not be empty");
  for (double m : mtow_t) {
    if (!(m > 0.0) || !std::isfinite(m)) fail_validation("synthetic spec: mtow_t must be > 0");
  }
  if (!(traffic_noise >= 0.0) || !(delay_noise >= 0.0)) {
    fail_validation("synthetic spec: noise levels must be >= 0");
  }
  if (record_count && *record_count < 0) {
    fail_validation("synthetic spec: record_count must be >= 0");
  }
}

ShiftedLogNormal SyntheticAirportSpec::window_distribution(int window_index) const {
  const auto k = static_cast<std::size_t>(window_index);
  const double mean = delay_from_traffic(traffic[k], capacity, cc);
  const double a = mean - theta[k];
  if (!(a > 0.0)) fail_validation("synthetic spec: window mean delay must exceed theta");
  const double s2 = std::log1p((delay_sd[k] * delay_sd[k]) / (a * a));
  return {std::log(a) - 0.5 * s2, std::sqrt(s2), theta[k]};
}

SyntheticAirportSpec synthetic_spec_from_json(const json& j) {
  static const std::set<std::string> known = {
      "name",  "seed",  "days",          "capacity",      "cc",     "traffic",
      "delay_sd", "theta", "n_f",        "P",             "w",      "c_init",
      "s",     "value_of_time", "coeffs", "mtow_t",       "traffic_noise",
      "delay_noise", "record_count"};
  if (!j.is_object()) fail_validation("synthetic spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail_validation("synthetic spec: unknown key '" + key + "'");
  }
  try {
    SyntheticAirportSpec spec;
    spec.name = read<std::string>(j, "name", spec.name);
    spec.seed = read<std::uint64_t>(j, "seed", spec.seed);
    spec.days = read<int>(j, "days", spec.days);
    spec.capacity = j.at("capacity").get<double>();
    spec.cc = j.at("cc").get<double>();
    const auto traffic = j.at("traffic").get<std::vector<double>>();
    if (traffic.size() != static_cast<std::size_t>(kWindowCount)) {
      fail_validation("synthetic spec: traffic needs " + std::to_string(kWindowCount) + " values");
    }
    std::copy(traffic.begin(), traffic.end(), spec.traffic.begin());
    spec.delay_sd = per_window(j, "delay_sd", 15.0);
    spec.theta = per_window(j, "theta", -15.0);
    spec.n_f = read<double>(j, "n_f", spec.n_f);
    spec.P = read<double>(j, "P", spec.P);
    spec.w = read<double>(j, "w", spec.w);
    spec.c_init = read<double>(j, "c_init", spec.c_init);
    spec.s = read<double>(j, "s", spec.s);
    spec.value_of_time = read<double>(j, "value_of_time", spec.value_of_time);
    if (j.contains("coeffs")) spec.coeffs = coeffs_from_json(j.at("coeffs"));
    if (j.contains("mtow_t")) {
      spec.mtow_t = j.at("mtow_t").is_number() ? std::vector<double>{j.at("mtow_t").get<double>()}
                                               : j.at("mtow_t").get<std::vector<double>>();
    }
    spec.traffic_noise = read<double>(j, "traffic_noise", spec.traffic_noise);
    spec.delay_noise = read<double>(j, "delay_noise", spec.delay_noise);
    if (j.contains("record_count")) spec.record_count = j.at("record_count").get<long long>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    fail_validation(std::string("synthetic spec: ") + e.what());
  }
}

json synthetic_spec_to_json(const SyntheticAirportSpec& spec) {
  json j = {{"name", spec.name},
            {"seed", spec.seed},
            {"days", spec.days},
            {"capacity", spec.capacity},
            {"cc", spec.cc},
            {"traffic", spec.traffic},
            {"delay_sd", spec.delay_sd},
            {"theta", spec.theta},
            {"n_f", spec.n_f},
            {"P", spec.P},
            {"w", spec.w},
            {"c_init", spec.c_init},
            {"s", spec.s},
            {"value_of_time", spec.value_of_time},
            {"coeffs", coeffs_to_json(spec.coeffs)},
            {"mtow_t", spec.mtow_t},
            {"traffic_noise", spec.traffic_noise},
            {"delay_noise", spec.delay_noise}};
  if (spec.record_count) j["record_count"] = *spec.record_count;
  return j;
}

AirportModel ground_truth_model(const SyntheticAirportSpec& spec, double sqrt_mtow) {
  spec.validate();
  AirportModel m;
  m.params.n_f = spec.n_f;
  m.params.P = spec.P;
  m.params.w_init = spec.w;
  m.params.C_init = spec.capacity;
  m.params.cc = spec.cc;
  m.params.c_init = spec.c_init;
  m.params.sqrt_mtow = sqrt_mtow;
  m.params.s = spec.s;
  m.params.v = spec.value_of_time;
  m.coeffs = spec.coeffs;
  for (int i = 0; i < kWindowCount; ++i) {
    HourWindow w;
    w.hour = kFirstHour + i;
    w.T_obs = spec.traffic[static_cast<std::size_t>(i)];
    w.delay_dist = spec.window_distribution(i);
    m.windows.push_back(w);
  }
  m.curve = build_corrected_curve(m.windows, 1.0, sqrt_mtow, m.coeffs);
  for (HourWindow& w : m.windows) {
    w.beta = post_calibrate_beta(w.T_obs, m.params.C_init, m.curve, m.params.s, m.params.cc).beta;
  }
  m.validate();
  return m;
}

SyntheticAirport generate_synthetic(const SyntheticAirportSpec& spec) {
  spec.validate();
  Stream rng(spec.seed);
  const auto n_days = static_cast<std::size_t>(spec.days);

  // Departures per (day, window).
  std::vector<std::array<long long, kWindowCount>> counts(n_days);
  for (std::size_t d = 0; d < n_days; ++d) {
    for (int i = 0; i < kWindowCount; ++i) {
      const double base = spec.traffic[static_cast<std::size_t>(i)];
      long long n;
      if (spec.traffic_noise == 0.0) {
        // Spread fractional traffic evenly over the days.
        const double dd = static_cast<double>(d);
        n = static_cast<long long>(std::floor((dd + 1.0) * base) - std::floor(dd * base));
      } else {
        n = std::max(0LL, std::llround(base * (1.0 + spec.traffic_noise * rng.normal())));
      }
      counts[d][static_cast<std::size_t>(i)] = n;
    }
  }

  // Delays per (day, window), before shuffling within the slot.
  std::vector<std::array<std::vector<double>, kWindowCount>> delays(n_days);
  for (int i = 0; i < kWindowCount; ++i) {
    const auto w = static_cast<std::size_t>(i);
    const ShiftedLogNormal dist = spec.window_distribution(i);
    if (spec.noiseless()) {
      // Midpoint quantiles of the pooled window sample, dealt to the days so
      // every slot gets an evenly spread share, then scaled on (x - theta)
      // so each slot mean follows the delay-traffic law for its count.
      struct Slot {
        double position;
        double key;
        std::size_t day;
      };
      std::vector<Slot> slots;
      for (std::size_t d = 0; d < n_days; ++d) {
        const long long n = counts[d][w];
        for (long long k = 0; k < n; ++k) {
          slots.push_back({(static_cast<double>(k) + 0.5) / static_cast<double>(n),
                           rng.uniform(), d});
        }
      }
      std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
        return a.position != b.position ? a.position < b.position : a.key < b.key;
      });
      const double total = static_cast<double>(slots.size());
      for (std::size_t j = 0; j < slots.size(); ++j) {
        const double q = (static_cast<double>(j) + 0.5) / total;
        delays[slots[j].day][w].push_back(std::exp(dist.mu + dist.sigma * normal_quantile(q)));
      }
      for (std::size_t d = 0; d < n_days; ++d) {
        auto& xs = delays[d][w];
        if (xs.empty()) continue;
        double excess = 0.0;
        for (double x : xs) excess += x;
        const double n = static_cast<double>(xs.size());
        const double target = delay_from_traffic(n, spec.capacity, spec.cc) - dist.theta;
        const double factor = target / (excess / n);
        for (double& x : xs) x = dist.theta + x * factor;
      }
    } else {
      for (std::size_t d = 0; d < n_days; ++d) {
        const long long n = counts[d][w];
        if (n == 0) continue;
        const double factor =
            spec.delay_noise > 0.0 ? std::max(0.05, 1.0 + spec.delay_noise * rng.normal()) : 1.0;
        auto& xs = delays[d][w];
        for (long long k = 0; k < n; ++k) {
          xs.push_back(dist.theta + factor * std::exp(dist.mu + dist.sigma * rng.normal()));
        }
      }
    }
  }

  SyntheticAirport out;
  std::size_t mtow_index = 0;
  for (std::size_t d = 0; d < n_days; ++d) {
    const std::string date = date_string(static_cast<int>(d));
    for (int i = 0; i < kWindowCount; ++i) {
      auto& xs = delays[d][static_cast<std::size_t>(i)];
      const std::size_t count = xs.size();
      for (std::size_t k = count; k > 1; --k) std::swap(xs[k - 1], xs[rng.index(k)]);
      for (std::size_t k = 0; k < count; ++k) {
        FlightRecord r;
        r.date = date;
        r.hour = kFirstHour + i;
        r.minute = std::min(
            59, static_cast<int>(60.0 * (static_cast<double>(k) + rng.uniform()) /
                                 static_cast<double>(count)));
        r.delay_min = xs[k];
        r.mtow_t = spec.mtow_t[mtow_index++ % spec.mtow_t.size()];
        r.pax = spec.n_f;
        out.records.push_back(std::move(r));
      }
    }
  }
  if (spec.record_count && static_cast<std::size_t>(*spec.record_count) < out.records.size()) {
    out.records.resize(static_cast<std::size_t>(*spec.record_count));
  }

  const double flights = static_cast<double>(out.records.size());
  AirportFinancials& f = out.financials;
  f.total_flights = flights;
  f.total_passengers = spec.n_f * flights;
  f.total_aero_revenue = spec.P * flights;
  f.total_non_aero_revenue = spec.w * f.total_passengers;
  f.total_operating_cost = spec.c_init * spec.days * kWindowCount;
  f.period_days = spec.days;
  f.value_of_time = spec.value_of_time;

  double root_sum = 0.0;
  for (const FlightRecord& r : out.records) root_sum += std::sqrt(r.mtow_t);
  const double sqrt_mtow = out.records.empty() ? std::sqrt(spec.mtow_t.front())
                                               : root_sum / flights;
  out.truth = ground_truth_model(spec, sqrt_mtow);
  return out;
}

std::string records_to_csv(const std::vector<FlightRecord>& records) {
  std::string out = "date,hour,minute,delay_min,mtow_t,pax\n";
  for (const FlightRecord& r : records) {
    out += r.date;
    out += ',';
    out += std::to_string(r.hour);
    out += ',';
    out += std::to_string(r.minute);
    out += ',';
    // Full precision so the records reproduce the generated delays exactly.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", r.delay_min);
    out += buf;
    out += ',';
    out += format_number(r.mtow_t);
    out += ',';
    if (r.pax >= 0.0) out += format_number(r.pax);
    out += '\n';
  }
  return out;
}

std::string financials_to_text(const AirportFinancials& f) {
  auto line = [](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(key) + "=" + buf + "\n";
  };
  return line("total_flights", f.total_flights) + line("total_passengers", f.total_passengers) +
         line("total_aero_revenue", f.total_aero_revenue) +
         line("total_non_aero_revenue", f.total_non_aero_revenue) +
         line("total_operating_cost", f.total_operating_cost) +
         line("period_days", f.period_days) + line("value_of_time", f.value_of_time);
}

json manifest_json(const SyntheticAirportSpec& spec, const SyntheticAirport& airport) {
  const AirportModel& t = airport.truth;
  json windows = json::array();
  for (const HourWindow& w : t.windows) {
    windows.push_back({{"hour", w.hour},
                       {"T_obs", w.T_obs},
                       {"beta", w.beta},
                       {"mu", w.delay_dist.mu},
                       {"sigma", w.delay_dist.sigma},
                       {"theta", w.delay_dist.theta},
                       {"mean_delay", w.delay_dist.mean()}});
  }
  return {{"spec", synthetic_spec_to_json(spec)},
          {"records", airport.records.size()},
          {"params", params_to_json(t.params)},
          {"coeffs", coeffs_to_json(t.coeffs)},
          {"windows", windows}};
}

void write_synthetic(const SyntheticAirportSpec& spec, const SyntheticAirport& airport,
                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail_io("cannot create directory '" + dir.string() + "': " + ec.message());
  write_text(records_to_csv(airport.records), dir / "records.csv");
  write_text(financials_to_text(airport.financials), dir / "financials.txt");
  write_json(manifest_json(spec, airport), dir / "manifest.json");
}

}  // namespace aircap
