#include "aircap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "aircap/data_io.hpp"
#include "aircap/error.hpp"
#include "aircap/model_io.hpp"
#include "aircap/synthetic.hpp"

namespace aircap {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) fail_validation(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail_validation(where + ": unknown key '" + key + "'");
  }
}

Grid parse_grid(const json& j, const std::string& where) {
  reject_unknown(j, {"min", "max", "steps"}, where);
  Grid g{j.at("min").get<double>(), j.at("max").get<double>(), j.at("steps").get<int>()};
  g.validate();
  return g;
}

std::vector<double> parse_values(const json& j, const std::string& where) {
  if (j.is_object()) return parse_grid(j, where).values();
  auto v = j.get<std::vector<double>>();
  if (v.empty()) fail_validation(where + " must not be empty");
  return v;
}

fs::path resolve(const fs::path& base, const json& j) {
  fs::path p = j.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

std::string status_of(bool ok, const std::string& error) { return ok ? "ok" : error; }

double value_or_nan(bool ok, double v) { return ok ? v : std::nan(""); }

struct Context {
  ScenarioConfig cfg;
  fs::path out_dir;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> coeffs_flag;
  std::optional<fs::path> records_flag;
  std::optional<fs::path> financials_flag;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

CostCoefficients resolve_coeffs(const Context& ctx) {
  if (ctx.coeffs_flag) {
    const std::string& v = *ctx.coeffs_flag;
    if (v == "published" || v == "sign-swapped") return CostCoefficients::preset(v);
    return coeffs_from_json(read_json(v));
  }
  if (ctx.cfg.coeffs) return coeffs_from_json(*ctx.cfg.coeffs);
  return CostCoefficients::published();
}

void ensure_out_dir(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) fail_io("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());
}

fs::path model_path(const Context& ctx) {
  return ctx.cfg.model.value_or(ctx.out_dir / "model.json");
}

Table window_report(const CalibratedAirport& cal) {
  Table t;
  t.columns = {"hour",   "T_obs",     "beta",        "mu",          "sigma",
               "theta",  "mean_delay_min", "samples", "sample_mean_min", "sample_sd_min",
               "expected_cost_eur", "profile_theta", "mean_mismatch"};
  for (std::size_t i = 0; i < cal.model.windows.size(); ++i) {
    const HourWindow& w = cal.model.windows[i];
    const LogNormalFit* fit = i < cal.window_fits.size() ? &cal.window_fits[i] : nullptr;
    t.add_row({static_cast<std::int64_t>(w.hour), w.T_obs, w.beta, w.delay_dist.mu,
               w.delay_dist.sigma, w.delay_dist.theta, w.delay_dist.mean(),
               static_cast<std::int64_t>(fit ? fit->samples : 0),
               fit ? fit->sample_mean : std::nan(""), fit ? fit->sample_sd : std::nan(""),
               expected_cost(w.delay_dist, cal.model.params.sqrt_mtow, cal.model.coeffs),
               static_cast<std::int64_t>(fit && fit->profile_theta),
               static_cast<std::int64_t>(fit && fit->mean_mismatch)});
  }
  return t;
}

Table curve_diagnostics(const CorrectedCostCurve& curve) {
  Table t;
  t.columns = {"mean_delay_min", "expected_cost_eur", "fitted_cost_eur", "raw_cost_eur"};
  for (const CurvePoint& p : curve.points) {
    t.add_row({p.mean_delay, p.expected_cost, curve(p.mean_delay), curve.raw(p.mean_delay)});
  }
  return t;
}

CalibratedAirport do_calibrate(const Context& ctx) {
  const auto records_path = ctx.records_flag ? ctx.records_flag : ctx.cfg.records;
  const auto financials_path = ctx.financials_flag ? ctx.financials_flag : ctx.cfg.financials;
  if (!records_path) fail_validation("no records file given (config 'records' or --records)");
  if (!financials_path) {
    fail_validation("no financials file given (config 'financials' or --financials)");
  }
  const AirportFinancials financials = load_financials(*financials_path);
  const RecordSet records = load_records(*records_path);
  if (!records.errors.empty()) {
    *ctx.err << records.errors.size() << " malformed record rows skipped\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(records.errors.size(), 10); ++i) {
      *ctx.err << "  line " << records.errors[i].line << ": " << records.errors[i].message << "\n";
    }
  }
  CalibrationOptions opts;
  opts.s = ctx.cfg.s;
  opts.coeffs = resolve_coeffs(ctx);
  opts.threads = ctx.threads;
  CalibratedAirport cal = calibrate_airport(financials, records.records, opts);

  ensure_out_dir(ctx);
  save_model(cal, model_path(ctx));
  write_table(window_report(cal), ctx.out_dir / "calibration_report.csv");
  write_table(curve_diagnostics(cal.model.curve), ctx.out_dir / "curve_diagnostics.csv");
  json summary = {{"params", params_to_json(cal.model.params)},
                  {"coeffs", coeffs_to_json(cal.model.coeffs)},
                  {"delay_capacity_r_squared", cal.capacity_fit.r_squared},
                  {"linear_r_squared", cal.capacity_fit.linear.r_squared},
                  {"regression_pairs", cal.capacity_fit.pairs},
                  {"curve_r_squared", cal.model.curve.r_squared},
                  {"records", records.records.size()},
                  {"skipped_rows", records.errors.size()},
                  {"warnings", cal.warnings}};
  write_json(summary, ctx.out_dir / "calibration_summary.json");

  const AirportParameters& p = cal.model.params;
  *ctx.out << "calibrated " << records.records.size() << " records\n"
           << "  C_init = " << format_number(p.C_init) << " flights/h, cc = " << format_number(p.cc)
           << " (R^2 " << format_number(cal.capacity_fit.r_squared) << ")\n"
           << "  n_f = " << format_number(p.n_f) << ", P = " << format_number(p.P)
           << ", w = " << format_number(p.w_init) << ", c_init = " << format_number(p.c_init)
           << " EUR/h, sqrt_mtow = " << format_number(p.sqrt_mtow) << "\n"
           << "  cost curve R^2 = " << format_number(cal.model.curve.r_squared) << "\n";
  for (const auto& w : cal.warnings) *ctx.out << "  warning: " << w << "\n";
  *ctx.out << "model written to " << model_path(ctx).string() << "\n";
  return cal;
}

AirportModel obtain_model(const Context& ctx) {
  const fs::path path = model_path(ctx);
  if (fs::exists(path)) return load_model(path).model;
  if ((ctx.cfg.records || ctx.records_flag) && (ctx.cfg.financials || ctx.financials_flag)) {
    return do_calibrate(ctx).model;
  }
  fail_io("model file '" + path.string() + "' not found; run calibrate first");
}

Grid capacity_grid(const Context& ctx, const AirportModel& m) {
  if (ctx.cfg.capacity_grid) return *ctx.cfg.capacity_grid;
  return {0.5 * m.params.C_init, 2.0 * m.params.C_init, 61};
}

void add_profit_columns(Table& t) {
  t.columns = {"capacity",      "operating_profit_eur", "aero_revenue_eur", "non_aero_revenue_eur",
               "capacity_cost_eur", "mean_delay_min",   "total_traffic",    "status"};
}

void add_profit_row(Table& t, const CapacityPoint& p) {
  const ProfitBreakdown& b = p.profit;
  t.add_row({p.C, value_or_nan(p.ok, b.operating_profit), value_or_nan(p.ok, b.aero_revenue),
             value_or_nan(p.ok, b.non_aero_revenue), value_or_nan(p.ok, b.capacity_cost),
             value_or_nan(p.ok, b.mean_delay()), value_or_nan(p.ok, b.total_traffic()),
             status_of(p.ok, p.error)});
}

void write_outputs(const Context& ctx, const std::string& name, const Table& table,
                   const json& summary) {
  ensure_out_dir(ctx);
  write_table(table, ctx.out_dir / (name + ".csv"));
  write_json(summary, ctx.out_dir / (name + ".json"));
}

void run_sweep_capacity(const Context& ctx, const AirportModel& m) {
  SweepOptions opts;
  opts.threads = ctx.threads;
  opts.cap_at_C_init = ctx.cfg.cap_at_C_init;
  const CapacitySweep sweep = sweep_capacity(m, ctx.cfg.alpha, capacity_grid(ctx, m), opts);
  Table t;
  add_profit_columns(t);
  for (const auto& p : sweep.points) add_profit_row(t, p);
  write_outputs(ctx, "sweep-capacity", t,
                {{"alpha", sweep.alpha},
                 {"optimum_capacity", sweep.optimum_C},
                 {"optimum_profit", sweep.optimum_profit},
                 {"capped", sweep.capped},
                 {"failed_points", sweep.failures}});
  *ctx.out << "optimal capacity " << format_number(sweep.optimum_C) << " flights/h, profit "
           << format_number(sweep.optimum_profit) << " EUR/day"
           << (sweep.capped ? " (capped at C_init)" : "") << "\n";
}

void run_evaluate_capacities(const Context& ctx, const AirportModel& m) {
  if (!ctx.cfg.capacities) fail_validation("evaluate-capacities needs 'capacities' in the config");
  const auto points = evaluate_capacities(m, ctx.cfg.alpha, *ctx.cfg.capacities, ctx.threads);
  Table t;
  add_profit_columns(t);
  json rows = json::array();
  for (const auto& p : points) {
    add_profit_row(t, p);
    rows.push_back({{"capacity", p.C}, {"ok", p.ok},
                    {"operating_profit", value_or_nan(p.ok, p.profit.operating_profit)}});
  }
  write_outputs(ctx, "evaluate-capacities", t, {{"alpha", ctx.cfg.alpha}, {"points", rows}});
  for (const auto& p : points) {
    *ctx.out << "C = " << format_number(p.C) << ": "
             << (p.ok ? format_number(p.profit.operating_profit) + " EUR/day" : p.error) << "\n";
  }
}

void run_sweep_nf(const Context& ctx, const AirportModel& m) {
  const std::vector<double> nf = ctx.cfg.nf_values.value_or(
      Grid{0.5 * m.params.n_f, 3.0 * m.params.n_f, 26}.values());
  SweepOptions opts;
  opts.threads = ctx.threads;
  const NfSweep sweep = sweep_nf(m, ctx.cfg.alpha, nf, capacity_grid(ctx, m), opts);
  Table t;
  t.columns = {"n_f", "optimum_capacity", "optimum_profit_eur", "capped", "status"};
  for (const auto& r : sweep.rows) {
    t.add_row({r.n_f, value_or_nan(r.ok, r.optimum_C), value_or_nan(r.ok, r.optimum_profit),
               static_cast<std::int64_t>(r.capped), status_of(r.ok, r.error)});
  }
  json summary = {{"alpha", ctx.cfg.alpha}, {"tail_points", sweep.tail_points}};
  if (sweep.tail) {
    summary["tail_slope"] = sweep.tail->slope;
    summary["tail_intercept"] = sweep.tail->intercept;
    summary["tail_r_squared"] = sweep.tail->r_squared;
  }
  write_outputs(ctx, "sweep-nf", t, summary);
  if (sweep.tail) {
    *ctx.out << "optimal capacity grows by " << format_number(sweep.tail->slope)
             << " flights/h per passenger above the cap (R^2 "
             << format_number(sweep.tail->r_squared) << ")\n";
  } else {
    *ctx.out << "optimal capacity stays at C_init over the n_f grid\n";
  }
}

void run_sweep_predictability(const Context& ctx, const AirportModel& m) {
  const std::vector<double> ks = ctx.cfg.k_values.value_or(std::vector<double>{1.0, 0.8, 0.6, 0.4, 0.2});
  SweepOptions opts;
  opts.threads = ctx.threads;
  const PredictabilitySweep sweep =
      sweep_predictability(m, ctx.cfg.alpha, ks, capacity_grid(ctx, m), ctx.cfg.fixed_capacity, opts);
  Table t;
  t.columns = {"k",          "operating_profit_eur", "mean_delay_min", "optimum_capacity",
               "optimum_profit_eur", "curve_r_squared", "non_negative", "monotone",
               "above_raw",  "family_ordered",       "status"};
  json rows = json::array();
  for (const auto& r : sweep.rows) {
    t.add_row({r.k, value_or_nan(r.ok, r.profit), value_or_nan(r.ok, r.mean_delay),
               value_or_nan(r.ok, r.optimum_C), value_or_nan(r.ok, r.optimum_profit),
               r.curve_r_squared, static_cast<std::int64_t>(r.validation.non_negative),
               static_cast<std::int64_t>(r.validation.monotone),
               static_cast<std::int64_t>(r.validation.above_raw),
               static_cast<std::int64_t>(r.validation.family_ordered), status_of(r.ok, r.error)});
    rows.push_back({{"k", r.k}, {"ok", r.ok}, {"warnings", r.validation.warnings()}});
  }
  write_outputs(ctx, "sweep-predictability", t,
                {{"alpha", ctx.cfg.alpha}, {"fixed_capacity", sweep.fixed_C}, {"rows", rows}});
  for (const auto& r : sweep.rows) {
    *ctx.out << "k = " << format_number(r.k) << ": "
             << (r.ok ? "profit " + format_number(r.profit) + " EUR/day, mean delay " +
                            format_number(r.mean_delay) + " min"
                      : r.error)
             << "\n";
  }
}

json breakeven_json(const BreakevenResult& b) {
  return {{"delta_C", b.delta_C},
          {"revenue_base", b.revenue_base},
          {"revenue_plus", b.revenue_plus},
          {"alpha_analytic", b.alpha_analytic},
          {"alpha_root", b.alpha_root},
          {"relative_difference", b.relative_difference()}};
}

void run_breakeven(const Context& ctx, const AirportModel& m) {
  const BreakevenResult b = breakeven_alpha(m, ctx.cfg.delta_C);
  Table t;
  t.columns = {"delta_C", "revenue_base_eur", "revenue_plus_eur", "alpha_analytic",
               "alpha_root", "relative_difference"};
  t.add_row({b.delta_C, b.revenue_base, b.revenue_plus, b.alpha_analytic, b.alpha_root,
             b.relative_difference()});
  write_outputs(ctx, "breakeven-alpha", t, breakeven_json(b));
  *ctx.out << "break-even alpha " << format_number(b.alpha_analytic) << " EUR per flight/h per hour"
           << " (root finder " << format_number(b.alpha_root) << ")\n";
}

void run_compare(const Context& ctx, const AirportModel& m) {
  std::vector<NamedModel> models;
  if (ctx.cfg.airports.empty()) fail_validation("compare-airports needs 'airports' in the config");
  if (ctx.cfg.model || fs::exists(model_path(ctx))) models.push_back({"model", m});
  for (const auto& [name, path] : ctx.cfg.airports) models.push_back({name, load_model(path).model});
  const auto rows = compare_airports(models, ctx.cfg.delta_C, ctx.threads);
  Table t;
  t.columns = {"airport", "alpha_star", "alpha_root", "daily_cost_eur", "ratio", "status"};
  json summary = json::array();
  for (const auto& r : rows) {
    t.add_row({r.name, value_or_nan(r.ok, r.breakeven.alpha_analytic),
               value_or_nan(r.ok, r.breakeven.alpha_root), value_or_nan(r.ok, r.daily_cost),
               value_or_nan(r.ok, r.ratio), status_of(r.ok, r.error)});
    summary.push_back({{"airport", r.name}, {"ok", r.ok},
                       {"alpha_star", value_or_nan(r.ok, r.breakeven.alpha_analytic)},
                       {"ratio", value_or_nan(r.ok, r.ratio)}});
  }
  write_outputs(ctx, "compare-airports", t, {{"delta_C", ctx.cfg.delta_C}, {"airports", summary}});
  for (const auto& r : rows) {
    *ctx.out << r.name << ": "
             << (r.ok ? "alpha* " + format_number(r.breakeven.alpha_analytic) + ", ratio " +
                            format_number(r.ratio)
                      : r.error)
             << "\n";
  }
}

void run_exploratory(const Context& ctx, const AirportModel& m) {
  SweepOptions opts;
  opts.threads = ctx.threads;
  const ExploratoryResult res =
      exploratory_profit(m, ctx.cfg.alpha, ctx.cfg.exploratory, capacity_grid(ctx, m), opts);
  Table t;
  add_profit_columns(t);
  for (const auto& p : res.points) add_profit_row(t, p);
  json maxima = json::array();
  for (const auto& mx : res.maxima) {
    maxima.push_back({{"capacity", mx.C}, {"profit", mx.profit}, {"plateau", mx.plateau}});
  }
  write_outputs(ctx, "exploratory-profit", t,
                {{"alpha", ctx.cfg.alpha},
                 {"t_e", ctx.cfg.exploratory.t_e},
                 {"s_e", ctx.cfg.exploratory.s_e},
                 {"delta_t_init", res.delta_t_init},
                 {"maxima", maxima}});
  *ctx.out << res.maxima.size() << " local maxima";
  for (const auto& mx : res.maxima) *ctx.out << " | C = " << format_number(mx.C);
  *ctx.out << "\n";
}

void run_sensitivity(const Context& ctx, const AirportModel& m) {
  const std::vector<double> ss = ctx.cfg.s_values.value_or(Grid{100.0, 1000.0, 10}.values());
  const auto rows = sensitivity_smoothness(m, ss, ctx.cfg.eval_capacity, ctx.threads);
  Table t;
  t.columns = {"s", "mean_delay_min", "airline_delay_cost_eur", "total_traffic", "status"};
  for (const auto& r : rows) {
    t.add_row({r.s, value_or_nan(r.ok, r.mean_delay), value_or_nan(r.ok, r.airline_delay_cost),
               value_or_nan(r.ok, r.total_traffic), status_of(r.ok, r.error)});
  }
  write_outputs(ctx, "sensitivity-smoothness", t,
                {{"eval_capacity", ctx.cfg.eval_capacity.value_or(m.params.C_init)},
                 {"points", rows.size()}});
  for (const auto& r : rows) {
    *ctx.out << "s = " << format_number(r.s) << ": "
             << (r.ok ? "mean delay " + format_number(r.mean_delay) + " min" : r.error) << "\n";
  }
}

void cmd_run(const Context& ctx, const std::string& name) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += "\n  " + n;
    fail_validation("unknown experiment '" + name + "'; valid experiments:" + list);
  }
  const AirportModel m = obtain_model(ctx);
  if (name == "sweep-capacity") run_sweep_capacity(ctx, m);
  else if (name == "evaluate-capacities") run_evaluate_capacities(ctx, m);
  else if (name == "sweep-nf") run_sweep_nf(ctx, m);
  else if (name == "sweep-predictability") run_sweep_predictability(ctx, m);
  else if (name == "breakeven-alpha") run_breakeven(ctx, m);
  else if (name == "compare-airports") run_compare(ctx, m);
  else if (name == "exploratory-profit") run_exploratory(ctx, m);
  else run_sensitivity(ctx, m);
}

void cmd_synth(const Context& ctx, const std::optional<fs::path>& spec_arg) {
  const auto spec_path = spec_arg ? spec_arg : ctx.cfg.synthetic_spec;
  if (!spec_path) fail_validation("synth needs a spec file (argument or config 'synthetic_spec')");
  SyntheticAirportSpec spec = synthetic_spec_from_json(read_json(*spec_path));
  if (ctx.seed) spec.seed = *ctx.seed;
  const SyntheticAirport airport = generate_synthetic(spec);
  write_synthetic(spec, airport, ctx.out_dir);
  *ctx.out << "wrote " << airport.records.size() << " records for '" << spec.name << "' to "
           << ctx.out_dir.string() << "\n";
}

void cmd_trace(const Context& ctx, std::optional<int> hour_flag, std::optional<double> cap_flag) {
  const AirportModel m = obtain_model(ctx);
  const int hour = hour_flag.value_or(ctx.cfg.trace_hour);
  if (hour < kFirstHour || hour > kLastHour) fail_validation("trace hour must lie in 5..22");
  const HourWindow& w = m.windows[static_cast<std::size_t>(hour - kFirstHour)];
  const double C = cap_flag ? *cap_flag : ctx.cfg.trace_capacity.value_or(m.params.C_init);
  const EquilibriumResult eq = solve_window(w, C, m.curve, m.params.s, m.params.cc);
  Grid grid;
  if (ctx.cfg.trace_grid) {
    grid = *ctx.cfg.trace_grid;
  } else {
    grid = {kDelayScale * (1.0 - m.params.cc) - 10.0, eq.mean_delay + 30.0, 201};
  }
  const std::vector<double> delays = grid.values();
  const auto rows = demand_supply_trace(w, C, m.curve, m.params.s, m.params.cc, delays);
  Table t;
  t.columns = {"delay_min", "demand_Pa", "supply_Pa"};
  for (const auto& r : rows) t.add_row({r.delay, r.demand, r.supply});
  ensure_out_dir(ctx);
  const std::string name = "trace_h" + std::to_string(hour);
  write_table(t, ctx.out_dir / (name + ".csv"));
  write_json({{"hour", hour},
              {"capacity", C},
              {"beta", w.beta},
              {"equilibrium_delay", eq.mean_delay},
              {"operate_prob", eq.operate_prob},
              {"realized_traffic", eq.realized_traffic}},
             ctx.out_dir / (name + ".json"));
  *ctx.out << "hour " << hour << ": equilibrium delay " << format_number(eq.mean_delay)
           << " min, P_a " << format_number(eq.operate_prob) << ", traffic "
           << format_number(eq.realized_traffic) << " flights/h\n";
}

}  // namespace

ScenarioConfig parse_config(const json& doc, const fs::path& base_dir) {
  reject_unknown(doc,
                 {"records", "financials", "model", "output_dir", "synthetic_spec", "coeffs", "s",
                  "alpha", "seed", "threads", "capacity_grid", "cap_at_C_init", "capacities",
                  "nf_grid", "k_grid", "s_grid", "fixed_capacity", "eval_capacity", "delta_C",
                  "airports", "exploratory", "trace"},
                 "config");
  ScenarioConfig c;
  try {
    if (doc.contains("records")) c.records = resolve(base_dir, doc["records"]);
    if (doc.contains("financials")) c.financials = resolve(base_dir, doc["financials"]);
    if (doc.contains("model")) c.model = resolve(base_dir, doc["model"]);
    if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, doc["output_dir"]);
    if (doc.contains("synthetic_spec")) c.synthetic_spec = resolve(base_dir, doc["synthetic_spec"]);
    if (doc.contains("coeffs")) {
      const json& co = doc["coeffs"];
      if (co.is_string() && co.get<std::string>() != "published" &&
          co.get<std::string>() != "sign-swapped") {
        c.coeffs = read_json(resolve(base_dir, co));
      } else {
        c.coeffs = co;
      }
      coeffs_from_json(*c.coeffs);
    }
    if (doc.contains("s")) c.s = doc["s"].get<double>();
    if (!(c.s > 0.0)) fail_validation("config: s must be > 0");
    if (doc.contains("alpha")) c.alpha = doc["alpha"].get<double>();
    require_finite(c.alpha, "config alpha");
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("threads")) c.threads = doc["threads"].get<unsigned>();
    if (c.threads < 1) fail_validation("config: threads must be >= 1");
    if (doc.contains("capacity_grid")) c.capacity_grid = parse_grid(doc["capacity_grid"], "capacity_grid");
    if (doc.contains("cap_at_C_init")) c.cap_at_C_init = doc["cap_at_C_init"].get<bool>();
    if (doc.contains("capacities")) c.capacities = parse_values(doc["capacities"], "capacities");
    if (doc.contains("nf_grid")) c.nf_values = parse_values(doc["nf_grid"], "nf_grid");
    if (doc.contains("k_grid")) c.k_values = parse_values(doc["k_grid"], "k_grid");
    if (doc.contains("s_grid")) c.s_values = parse_values(doc["s_grid"], "s_grid");
    if (doc.contains("fixed_capacity")) c.fixed_capacity = doc["fixed_capacity"].get<double>();
    if (doc.contains("eval_capacity")) c.eval_capacity = doc["eval_capacity"].get<double>();
    if (doc.contains("delta_C")) c.delta_C = doc["delta_C"].get<double>();
    if (doc.contains("airports")) {
      for (const auto& a : doc["airports"]) {
        reject_unknown(a, {"name", "model"}, "airports entry");
        c.airports.emplace_back(a.at("name").get<std::string>(), resolve(base_dir, a.at("model")));
      }
    }
    if (doc.contains("exploratory")) {
      const json& e = doc["exploratory"];
      reject_unknown(e, {"t_e", "s_e"}, "exploratory");
      c.exploratory.t_e = e.value("t_e", 0.0);
      c.exploratory.s_e = e.value("s_e", 0.0);
    }
    if (doc.contains("trace")) {
      const json& t = doc["trace"];
      reject_unknown(t, {"hour", "capacity", "grid"}, "trace");
      c.trace_hour = t.value("hour", c.trace_hour);
      if (t.contains("capacity")) c.trace_capacity = t["capacity"].get<double>();
      if (t.contains("grid")) c.trace_grid = parse_grid(t["grid"], "trace.grid");
    }
  } catch (const json::exception& e) {
    fail_validation(std::string("config: ") + e.what());
  }
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  const json doc = read_json(path);
  try {
    return parse_config(doc, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "sweep-capacity",    "evaluate-capacities", "sweep-nf",
      "sweep-predictability", "breakeven-alpha",  "compare-airports",
      "exploratory-profit", "sensitivity-smoothness"};
  return names;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Airport capacity economics: calibration, equilibrium and experiments"};
  app.name("aircap");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string coeffs;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  auto* config_opt = app.add_option("--config", config_path, "Scenario JSON file");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for synthetic data");
  auto* coeffs_opt = app.add_option("--coeffs", coeffs, "published | sign-swapped | coefficient JSON file");

  auto* cal = app.add_subcommand("calibrate", "Calibrate a model from records and financials");
  std::string records_path;
  std::string financials_path;
  auto* records_opt = cal->add_option("--records", records_path, "Flight record CSV");
  auto* financials_opt = cal->add_option("--financials", financials_path, "Financials key=value file");

  auto* run = app.add_subcommand("run", "Run an experiment on a calibrated model");
  std::string experiment;
  run->add_option("experiment", experiment, "Experiment name")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic airport");
  std::string spec_path;
  auto* spec_opt = synth->add_option("spec", spec_path, "Synthetic airport spec (JSON)");

  auto* trace = app.add_subcommand("trace", "Write demand and supply curves of one window");
  int hour = 0;
  double capacity = 0.0;
  auto* hour_opt = trace->add_option("--hour", hour, "Window start hour (5..22)");
  auto* cap_opt = trace->add_option("--capacity", capacity, "Capacity (flights/h)");

  std::vector<std::string> argv_store = {"aircap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (run->parsed() && experiment.empty()) {
      err << "valid experiments:";
      for (const auto& n : experiment_names()) err << " " << n;
      err << "\n";
    }
    return 2;
  }

  try {
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    if (config_opt->count()) ctx.cfg = load_config(config_path);
    ctx.out_dir = out_opt->count() ? fs::path(out_dir) : ctx.cfg.output_dir.value_or(fs::path("."));
    ctx.threads = threads_opt->count() ? threads : ctx.cfg.threads;
    if (seed_opt->count()) ctx.seed = seed;
    else ctx.seed = ctx.cfg.seed;
    if (coeffs_opt->count()) ctx.coeffs_flag = coeffs;
    if (records_opt->count()) ctx.records_flag = fs::path(records_path);
    if (financials_opt->count()) ctx.financials_flag = fs::path(financials_path);

    if (cal->parsed()) {
      do_calibrate(ctx);
    } else if (run->parsed()) {
      cmd_run(ctx, experiment);
    } else if (synth->parsed()) {
      cmd_synth(ctx, spec_opt->count() ? std::optional<fs::path>(spec_path) : std::nullopt);
    } else if (trace->parsed()) {
      cmd_trace(ctx, hour_opt->count() ? std::optional<int>(hour) : std::nullopt,
                cap_opt->count() ? std::optional<double>(capacity) : std::nullopt);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kNumerical ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace aircap
