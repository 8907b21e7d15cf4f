// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aircap/cli.hpp"
#include "aircap/data_io.hpp"
#include "aircap/experiments.hpp"
#include "aircap/synthetic.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

using namespace aircap;
using namespace aircap::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void fail(const std::string& why) {
    if (out_.pass) out_.detail = why;
    out_.pass = false;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> profits(const std::vector<CapacityPoint>& pts) {
  std::vector<double> out;
  for (const auto& p : pts) out.push_back(p.profit.operating_profit);
  return out;
}

Outcome calibration_round_trip() {
  Report r;
  const SyntheticAirport& a = fixture_airport();
  r.require(a.records.size() >= 100000, "fewer than 1e5 records");
  CalibrationOptions opts;
  opts.coeffs = CostCoefficients::sign_swapped();
  const auto t0 = std::chrono::steady_clock::now();
  const CalibratedAirport cal = calibrate_airport(a.financials, a.records, opts);
  const double secs = seconds_since(t0);
  const AirportModel& m = cal.model;
  const double eC = std::abs(m.params.C_init / a.truth.params.C_init - 1.0);
  const double ecc = std::abs(m.params.cc / a.truth.params.cc - 1.0);
  r.require(eC <= 1e-4, fmt("C off by %.3g relative", eC));
  r.require(ecc <= 1e-4, fmt("cc off by %.3g relative", ecc));
  double worst_dist = 0.0;
  double worst_beta = 0.0;
  for (int i = 0; i < kWindowCount; ++i) {
    const auto& got = m.windows[i].delay_dist;
    const auto& want = a.truth.windows[i].delay_dist;
    worst_dist = std::max({worst_dist, std::abs(got.mu / want.mu - 1.0),
                           std::abs(got.sigma / want.sigma - 1.0)});
    const EquilibriumResult eq =
        solve_window(m.windows[i], m.params.C_init, m.curve, m.params.s, m.params.cc);
    worst_beta = std::max(worst_beta, std::abs(eq.realized_traffic - m.windows[i].T_obs));
  }
  r.require(worst_dist <= 0.02, fmt("lognormal parameter off by %.3g relative", worst_dist));
  r.require(worst_beta <= 1e-6, fmt("beta self-consistency error %.3g flights/h", worst_beta));
  r.require(secs < 60.0, fmt("calibration took %.1f s", secs));
  r.note(fmt("C err %.2g, mu/sigma err %.2g, beta err %.2g", std::max(eC, ecc), worst_dist,
             worst_beta) +
         fmt(", %.2f s", secs));
  return r.result();
}

Outcome equilibrium_oracle() {
  Report r;
  const AirportModel& m = fixture_calibrated().model;
  std::vector<CorrectedCostCurve> curves = {m.curve};
  for (double k : {0.6, 0.2}) {
    curves.push_back(build_corrected_curve(m.windows, k, m.params.sqrt_mtow, m.coeffs));
  }
  SyntheticAirportSpec other = small_spec();
  other.capacity = 60.0;
  other.cc = 0.98;
  for (auto& sd : other.delay_sd) sd = 25.0;
  for (auto& th : other.theta) th = -30.0;
  for (auto& t : other.traffic) t *= 0.8;
  curves.push_back(ground_truth_model(other, 8.5).curve);
  for (const auto& c : curves) r.require(c.validation.ok(), "a test curve failed validation");

  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> beta(1.0, 80.0);
  std::uniform_real_distribution<double> ratio(0.35, 8.0);
  std::uniform_real_distribution<double> ccd(0.95, 1.15);
  std::uniform_real_distribution<double> sd(200.0, 2000.0);
  double worst = 0.0;
  int bad_roots = 0;
  for (int i = 0; i < 100; ++i) {
    const CorrectedCostCurve& curve = curves[static_cast<std::size_t>(i) % curves.size()];
    const double b = beta(rng);
    const double C = b * ratio(rng);
    const double cc = ccd(rng);
    const double s = sd(rng);
    const EquilibriumResult eq = solve_window(b, C, curve, s, cc);
    const double lo = 120.0 * (1.0 - cc) - 1.0;
    const double hi = delay_from_traffic(b, C, cc) + 1.0;
    const BisectionRoot o = bisection_equilibrium(b, C, curve, s, cc, lo, hi, 200000);
    if (o.sign_changes != 1) ++bad_roots;
    worst = std::max(worst, std::abs(eq.mean_delay - o.delay));
  }
  r.require(bad_roots == 0, fmt("%.0f windows without exactly one sign change", bad_roots));
  r.require(worst <= 1e-6, fmt("max |delay - oracle| = %.3g min", worst));
  r.note(fmt("100 windows, max |delay - oracle| = %.2g min, unique roots", worst));
  return r.result();
}

Outcome quadrature_vs_monte_carlo() {
  Report r;
  std::mt19937_64 rng(777);
  // theta stays above -0.7 * median so the bulk of the mass is late; with all
  // mass early the expected cost is ~0 and a relative gap is meaningless.
  std::uniform_real_distribution<double> mu(2.0, 3.5);
  std::uniform_real_distribution<double> sg(0.2, 0.9);
  std::uniform_real_distribution<double> th(0.0, 0.7);
  std::uniform_real_distribution<double> root(5.0, 10.0);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double m = mu(rng);
    const double sd = sg(rng);
    const ShiftedLogNormal d{m, sd, -th(rng) * std::exp(m)};
    const double sq = root(rng);
    const CostCoefficients k = (i % 2 == 0) ? CostCoefficients::sign_swapped() : CostCoefficients::published();
    const double q = expected_cost(d, sq, k);
    const double mc = monte_carlo_expected_cost(d, sq, k, 10000000, 1000 + static_cast<std::uint64_t>(i));
    worst = std::max(worst, std::abs(q - mc) / std::abs(mc));
  }
  const double secs = seconds_since(t0);
  r.require(worst <= 0.003, fmt("max relative gap %.3g", worst));
  r.require(secs < 120.0, fmt("took %.1f s", secs));
  r.note(fmt("50 distributions, max relative gap %.2g, %.1f s", worst, secs));
  return r.result();
}

Outcome cost_curve_structure() {
  Report r;
  const AirportModel& m = fixture_calibrated().model;
  double worst_limit = 0.0;
  for (const auto& w : m.windows) {
    const ShiftedLogNormal tight = scale_sigma(w.delay_dist, 1e-7);
    const double raw = raw_cost_of_delay(tight.mean(), m.params.sqrt_mtow, m.coeffs);
    const double ec = expected_cost(tight, m.params.sqrt_mtow, m.coeffs);
    if (raw > 0.0) worst_limit = std::max(worst_limit, std::abs(ec / raw - 1.0));
  }
  r.require(worst_limit <= 1e-6, fmt("sd->0 limit off by %.3g relative", worst_limit));

  r.require(m.coeffs.linear(m.params.sqrt_mtow) >= 0.0 && m.coeffs.quadratic(m.params.sqrt_mtow) >= 0.0,
            "fixture effective coefficients are negative");
  std::vector<CorrectedCostCurve> family;
  for (double k : {1.0, 0.8, 0.6, 0.4, 0.2}) {
    family.push_back(build_corrected_curve(m.windows, k, m.params.sqrt_mtow, m.coeffs));
  }
  validate_family(family);
  double min_r2 = 1.0;
  for (const auto& c : family) {
    min_r2 = std::min(min_r2, c.r_squared);
    r.require(c.validation.ok(), "family member failed a shape check");
  }
  // Smaller k (less spread) never costs more, on a dense shared grid.
  const double lo = family[0].eval_lo();
  const double hi = family[0].eval_hi();
  double worst_order = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = lo + (hi - lo) * i / 2000.0;
    for (std::size_t j = 1; j < family.size(); ++j) {
      const double excess = family[j](x) - family[j - 1](x);
      worst_order = std::max(worst_order, excess / std::max(1.0, family[j - 1](x)));
    }
  }
  r.require(worst_order <= 1e-6, fmt("curve with smaller k lies above by %.3g relative", worst_order));
  r.require(min_r2 > 0.95, fmt("fit R^2 %.4f", min_r2));
  r.note(fmt("sd->0 err %.2g, min R^2 %.5f, ordering excess %.2g", worst_limit, min_r2, worst_order));
  return r.result();
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

Outcome capacity_regimes() {
  Report r;
  const AirportModel& m = fixture_calibrated().model;
  const Grid grid{100, 600, 51};
  r.require(non_decreasing(profits(sweep_capacity(m, 0.0, grid).points)),
            "profit not monotone increasing at alpha = 0");
  const CapacitySweep costly = sweep_capacity(m, 2000.0, grid);
  r.require(non_increasing(profits(costly.points)), "profit not monotone decreasing at alpha = 2000");
  r.require(costly.optimum_C == grid.min, "large-alpha optimum not at the grid minimum");

  const CapacitySweep mid = sweep_capacity(m, 100.0, grid);
  const auto p = profits(mid.points);
  int interior_maxima = 0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] > p[i - 1] && p[i] > p[i + 1]) ++interior_maxima;
  }
  r.require(interior_maxima == 1 && p.front() < mid.optimum_profit && p.back() < mid.optimum_profit,
            fmt("alpha = 100: %.0f interior grid maxima", interior_maxima));
  const Grid fine{100, 600, 501};
  const auto fp = evaluate_capacities(m, 100.0, fine.values());
  std::size_t best = 0;
  for (std::size_t i = 1; i < fp.size(); ++i) {
    if (fp[i].profit.operating_profit > fp[best].profit.operating_profit) best = i;
  }
  const double step = (fine.max - fine.min) / (fine.steps - 1);
  const double gap = std::abs(mid.optimum_C - fp[best].C);
  r.require(gap <= step, fmt("optimum %.3f vs fine scan %.3f", mid.optimum_C, fp[best].C));
  r.note(fmt("alpha=100 optimum C=%.3f, fine-scan argmax %.1f (step %.1f)", mid.optimum_C, fp[best].C, step));
  return r.result();
}

Outcome nf_shape() {
  Report r;
  const AirportModel& m = fixture_calibrated().model;
  std::vector<double> nf;
  for (int i = 0; i <= 27; ++i) nf.push_back(60.0 + 20.0 * i);
  const NfSweep s = sweep_nf(m, 300.0, nf, {100, 900, 81});
  std::size_t first_free = s.rows.size();
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    r.require(s.rows[i].ok, "n_f sweep row failed");
    if (!s.rows[i].capped && first_free == s.rows.size()) first_free = i;
  }
  r.require(first_free > 0 && first_free < s.rows.size(), "no capped region followed by growth");
  for (std::size_t i = 0; i < first_free; ++i) {
    r.require(s.rows[i].optimum_C == m.params.C_init, "optimum differs from C_init below threshold");
  }
  for (std::size_t i = first_free; i < s.rows.size(); ++i) {
    r.require(!s.rows[i].capped, "optimum falls back to the cap above threshold");
    if (i > first_free) r.require(s.rows[i].optimum_C > s.rows[i - 1].optimum_C, "optimum not increasing");
  }
  r.require(s.tail.has_value(), "no tail fit");
  if (s.tail) {
    r.require(s.tail->r_squared > 0.99, fmt("tail R^2 %.4f", s.tail->r_squared));
    r.note(fmt("threshold n_f=%.0f, tail slope %.3f, R^2 %.5f", s.rows[first_free].n_f,
               s.tail->slope, s.tail->r_squared));
  }
  return r.result();
}

Outcome predictability_tradeoff() {
  Report r;
  const AirportModel& m = fixture_calibrated().model;
  const std::vector<double> ks = {1.0, 0.8, 0.6, 0.4, 0.2};
  const PredictabilitySweep s = sweep_predictability(m, 150.0, ks, {100, 600, 51});
  std::vector<double> profit;
  std::vector<double> delay;
  std::vector<double> opt;
  for (const auto& row : s.rows) {
    r.require(row.ok, "predictability row failed: " + row.error);
    r.require(row.validation.ok(), "curve family failed validation");
    profit.push_back(row.profit);
    delay.push_back(row.mean_delay);
    opt.push_back(row.optimum_C);
  }
  r.require(non_decreasing(profit), "fixed-capacity profit decreases as k decreases");
  r.require(non_decreasing(delay), "mean delay decreases as k decreases");
  r.require(non_decreasing(opt), "optimal capacity decreases as k decreases");
  if (profit.size() == ks.size()) {
    r.note(fmt("k 1->0.2: profit +%.1f%%, delay %.2f->%.2f min", 100.0 * (profit.back() / profit.front() - 1.0),
               delay.front(), delay.back()) +
           fmt(", optimum C %.1f->%.1f", opt.front(), opt.back()));
  }
  return r.result();
}

Outcome breakeven_size_independence() {
  Report r;
  const BreakevenResult base = breakeven_alpha(fixture_calibrated().model, 1.0);
  double worst_dual = base.relative_difference();
  std::vector<NamedModel> fleet;
  for (double l : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    SyntheticAirportSpec s = fixture_spec();
    s.days = 100;
    s.capacity *= l;
    s.P *= l;
    s.w *= l;
    s.c_init *= l;
    for (auto& t : s.traffic) t *= l;
    const SyntheticAirport a = generate_synthetic(s);
    CalibrationOptions o;
    o.coeffs = s.coeffs;
    fleet.push_back({fmt("scale %.1f", l), calibrate_airport(a.financials, a.records, o).model});
  }
  const auto rows = compare_airports(fleet, 1.0, 2);
  double lo = 1e300;
  double hi = 0.0;
  for (const auto& row : rows) {
    r.require(row.ok, "comparison row failed: " + row.error);
    worst_dual = std::max(worst_dual, row.breakeven.relative_difference());
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  r.require(worst_dual <= 1e-6, fmt("analytic vs root differ by %.3g", worst_dual));
  const double spread = hi / lo - 1.0;
  r.require(spread <= 0.02, fmt("ratio spread %.3g", spread));
  r.note(fmt("dual-method diff %.2g, ratio spread %.2g over 5 sizes", worst_dual, spread));
  return r.result();
}

Outcome multiple_maxima() {
  Report r;
  const AirportModel& m = fixture_calibrated().model;
  // Constructed by a scan over (alpha, t_e, s_e); spend stays positive here.
  const ExploratorySpendParams params{-15.0, -200.0};
  const double alpha = 200.0;
  const ExploratoryResult coarse = exploratory_profit(m, alpha, params, {50, 700, 131});
  const ExploratoryResult fine = exploratory_profit(m, alpha, params, {50, 700, 261});
  r.require(coarse.maxima.size() >= 2, fmt("%.0f local maxima", coarse.maxima.size()));
  r.require(coarse.maxima.size() == fine.maxima.size(), "maxima count changes under refinement");
  double shift = 0.0;
  for (std::size_t i = 0; i < std::min(coarse.maxima.size(), fine.maxima.size()); ++i) {
    shift = std::max(shift, std::abs(coarse.maxima[i].C - fine.maxima[i].C));
  }
  r.require(shift <= 0.01, fmt("maxima moved by %.3g flights/h", shift));

  const Grid g{100, 600, 51};
  const ExploratoryResult zero = exploratory_profit(m, 100.0, {0.0, 0.0}, g);
  const CapacitySweep constant = sweep_capacity(m, 100.0, g);
  r.require(profits(zero.points) == profits(constant.points),
            "t_e = s_e = 0 differs from the constant-spend sweep");
  std::string where;
  for (const auto& mx : coarse.maxima) where += fmt(" %.2f", mx.C);
  r.note("maxima at C =" + where + fmt(", refinement shift %.2g", shift));
  return r.result();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome determinism() {
  Report r;
  const fs::path root = fs::temp_directory_path() / "aircap_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  write_json(synthetic_spec_to_json(fixture_spec()), root / "spec.json");

  auto pipeline = [&](const std::string& tag, unsigned threads) {
    const fs::path dir = root / tag;
    fs::create_directories(dir);
    write_json({{"records", "data/records.csv"},
                {"financials", "data/financials.txt"},
                {"synthetic_spec", "../spec.json"},
                {"coeffs", "sign-swapped"},
                {"alpha", 150},
                {"threads", threads},
                {"capacity_grid", {{"min", 100}, {"max", 600}, {"steps", 26}}},
                {"capacities", {200, 250, 300}},
                {"nf_grid", {{"min", 60}, {"max", 600}, {"steps", 10}}},
                {"k_grid", {1.0, 0.6, 0.2}},
                {"s_grid", {{"min", 250}, {"max", 1000}, {"steps", 4}}},
                {"exploratory", {{"t_e", -15}, {"s_e", -200}}},
                {"airports", {{{"name", "twin"}, {"model", "out/model.json"}}}},
                {"output_dir", "out"}},
               dir / "scenario.json");
    const std::string cfg = (dir / "scenario.json").string();
    int failures = 0;
    failures += run({"--config", cfg, "--out", (dir / "data").string(), "synth"}) != 0;
    failures += run({"--config", cfg, "calibrate"}) != 0;
    for (const auto& name : experiment_names()) failures += run({"--config", cfg, "run", name}) != 0;
    failures += run({"--config", cfg, "trace", "--hour", "8"}) != 0;
    return failures;
  };

  int failures = pipeline("a", 1) + pipeline("b", 4) + pipeline("c", 1);
  r.require(failures == 0, fmt("%.0f commands failed", failures));
  std::size_t files = 0;
  for (const char* sub : {"data", "out"}) {
    for (const auto& entry : fs::directory_iterator(root / "a" / sub)) {
      const fs::path rel = fs::path(sub) / entry.path().filename();
      ++files;
      const std::string a = slurp(root / "a" / rel);
      r.require(a == slurp(root / "c" / rel), "re-run differs: " + rel.string());
      r.require(a == slurp(root / "b" / rel), "thread count changes " + rel.string());
    }
  }
  r.require(files >= 20, fmt("only %.0f output files", files));
  r.note(fmt("%.0f files byte-identical across re-runs and 1 vs 4 threads", files));
  return r.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"calibration round trip", calibration_round_trip},
      {"equilibrium vs bisection oracle", equilibrium_oracle},
      {"expected cost vs Monte Carlo", quadrature_vs_monte_carlo},
      {"cost curve family structure", cost_curve_structure},
      {"capacity sweep regimes", capacity_regimes},
      {"passengers-per-flight sweep shape", nf_shape},
      {"predictability trade-off", predictability_tradeoff},
      {"break-even alpha and size independence", breakeven_size_independence},
      {"delay-dependent spend, multiple maxima", multiple_maxima},
      {"determinism and thread invariance", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
