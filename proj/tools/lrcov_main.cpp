#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrcov/csv.hpp"
#include "lrcov/estimator.hpp"
#include "lrcov/longmemory.hpp"
#include "lrcov/reports.hpp"
#include "lrcov/simulate.hpp"
#include "lrcov/structural.hpp"
#include "lrcov/tuning.hpp"

namespace {

using lrcov::Errc;
using lrcov::Error;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::bad_config: return 2;
    case Errc::parse_error:
    case Errc::non_numeric:
    case Errc::too_few_rows: return 3;
    case Errc::io_error: return 5;
    default: return 4; // numerical failures
  }
}

// ------------------------------------------------------------ value parsing
std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::bad_config, "cannot parse " + what + " value '" + s + "'");
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::bad_config, "cannot parse " + what + " value '" + s + "'");
}

// "a,b,c" or "lo:hi:step" (inclusive within 1e-12 of hi).
std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3)
      throw Error(Errc::bad_config, what + " range must look like lo:hi:step");
    const double lo = parse_double(parts[0], what);
    const double hi = parse_double(parts[1], what);
    const double step = parse_double(parts[2], what);
    if (!(step > 0.0) || hi < lo)
      throw Error(Errc::bad_config, what + " range needs step > 0 and hi >= lo");
    for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
  } else {
    for (const std::string& part : split(s, ','))
      out.push_back(parse_double(part, what));
  }
  if (out.empty()) throw Error(Errc::bad_config, what + " list is empty");
  return out;
}

// "a,b,c" or "lo:hi" (inclusive, step 1).
std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 2)
      throw Error(Errc::bad_config, what + " range must look like lo:hi");
    const int lo = parse_int(parts[0], what);
    const int hi = parse_int(parts[1], what);
    if (hi < lo) throw Error(Errc::bad_config, what + " range needs hi >= lo");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  } else {
    for (const std::string& part : split(s, ','))
      out.push_back(parse_int(part, what));
  }
  if (out.empty()) throw Error(Errc::bad_config, what + " list is empty");
  return out;
}

lrcov::Criterion criterion_from_name(const std::string& name) {
  if (name == "structural") return lrcov::Criterion::structural;
  if (name == "kpss") return lrcov::Criterion::kpss;
  if (name == "rs") return lrcov::Criterion::rs;
  if (name == "vs") return lrcov::Criterion::vs;
  if (name == "ks") return lrcov::Criterion::ks;
  throw Error(Errc::bad_config, "unknown criterion '" + name +
                                    "' (expected structural, kpss, rs, vs or ks)");
}

lrcov::LmCriterion lm_criterion_from_name(const std::string& name) {
  if (name == "kpss") return lrcov::LmCriterion::kpss;
  if (name == "rs") return lrcov::LmCriterion::rs;
  if (name == "vs") return lrcov::LmCriterion::vs;
  if (name == "ks") return lrcov::LmCriterion::ks;
  throw Error(Errc::bad_config,
              "unknown criterion '" + name + "' (expected kpss, rs, vs or ks)");
}

int default_threads() {
  if (const char* env = std::getenv("LRCOV_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// ------------------------------------------------------------ config merge
// Expand "--config FILE" into explicit flags: every key of the JSON object
// becomes "--key value" unless the flag already appears on the command line.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw Error(Errc::bad_config, "--config requires a file path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_config, "malformed config JSON: " + std::string(e.what()));
  }
  if (!j.is_object())
    throw Error(Errc::bad_config, "config file must contain a JSON object");

  auto present = [&args](const std::string& flag) {
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (present(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string sval;
    if (value.is_string()) {
      sval = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t k = 0; k < value.size(); ++k) {
        if (k) sval += ',';
        sval += value[k].is_string() ? value[k].get<std::string>() : value[k].dump();
      }
    } else {
      sval = value.dump();
    }
    args.push_back(flag);
    args.push_back(sval);
  }
  return args;
}

// ------------------------------------------------------------- subcommands
struct IngestCli {
  std::string input;
  std::string y_column;
  bool no_header = false;
  bool no_intercept = false;
};

void add_ingest(CLI::App* sub, IngestCli& o) {
  sub->add_option("--input", o.input, "input CSV (response column + covariate columns)")
      ->required();
  sub->add_option("--y-column", o.y_column, "response column name (default: first column)");
  sub->add_flag("--no-header", o.no_header, "input has no header row");
  sub->add_flag("--no-intercept", o.no_intercept, "do not prepend an intercept column");
}

lrcov::RegressionData load(const IngestCli& o) {
  lrcov::IngestOptions opts;
  opts.header = !o.no_header;
  opts.add_intercept = !o.no_intercept;
  opts.y_column = o.y_column;
  return lrcov::ingest_csv(o.input, opts);
}

void add_config_stub(CLI::App* sub, std::string& sink) {
  sub->add_option("--config", sink,
                  "JSON file with default option values (command-line flags win)");
}

struct Cli {
  std::string config_sink;

  // estimate
  IngestCli est_in;
  int est_m = 0;
  double est_tau = 0.0;
  std::string est_kernel = "epanechnikov";
  bool est_threshold = false;
  std::string est_format = "csv";
  std::string est_out;

  // test-structural
  IngestCli ts_in;
  int ts_m = -1;
  double ts_tau = -1.0;
  bool ts_auto = false;
  int ts_B = 1000;
  int ts_Bmv = 100;
  std::uint64_t ts_seed = 0;
  std::string ts_kernel = "epanechnikov";
  std::string ts_levels = "0.05,0.10";
  int ts_threads = default_threads();
  std::string ts_out;
  CLI::Option* ts_m_opt = nullptr;
  CLI::Option* ts_tau_opt = nullptr;

  // test-longmemory
  IngestCli tl_in;
  double tl_b = -1.0;
  double tl_eta = -1.0;
  int tl_m = -1;
  double tl_tau = -1.0;
  bool tl_auto = false;
  std::string tl_criterion = "kpss";
  int tl_B = 1000;
  int tl_Bmv = 100;
  std::uint64_t tl_seed = 0;
  std::string tl_kernel = "epanechnikov";
  int tl_threads = default_threads();
  std::string tl_out;
  bool tl_gcv = false;
  CLI::Option* tl_b_opt = nullptr;
  CLI::Option* tl_eta_opt = nullptr;
  CLI::Option* tl_m_opt = nullptr;
  CLI::Option* tl_tau_opt = nullptr;

  // select-tuning
  IngestCli st_in;
  std::string st_criterion;
  std::string st_mgrid;
  std::string st_taugrid;
  int st_Bmv = 100;
  std::uint64_t st_seed = 0;
  double st_b = -1.0;
  double st_eta = -1.0;
  std::string st_kernel = "epanechnikov";
  int st_threads = default_threads();
  std::string st_out;

  // simulate
  std::string sim_scenario;
  int sim_n = 300;
  std::string sim_delta;
  std::string sim_d;
  std::string sim_test = "structural";
  int sim_reps = 500;
  std::uint64_t sim_seed = 0;
  int sim_B = 200;
  int sim_m = -1;
  double sim_tau = -1.0;
  bool sim_auto = false;
  double sim_b = -1.0;
  double sim_eta = -1.0;
  std::string sim_criterion = "kpss";
  std::string sim_kernel = "epanechnikov";
  std::string sim_levels = "0.05,0.10";
  int sim_burn = 2000;
  int sim_threads = default_threads();
  std::string sim_format = "json";
  bool sim_emit_data = false;
  std::string sim_out;
  CLI::Option* sim_m_opt = nullptr;
  CLI::Option* sim_tau_opt = nullptr;
  CLI::Option* sim_b_opt = nullptr;
  CLI::Option* sim_eta_opt = nullptr;

  // estimate-d
  IngestCli ed_in;
  std::string ed_mgrid = "8,12,16,24,32";
  double ed_tau = -1.0;
  std::string ed_kernel = "epanechnikov";
  std::string ed_out;
};

lrcov::ReportFormat format_from_name(const std::string& name) {
  if (name == "json") return lrcov::ReportFormat::json;
  if (name == "csv") return lrcov::ReportFormat::csv;
  throw Error(Errc::bad_config, "unknown format '" + name + "' (expected json or csv)");
}

void run_estimate(const Cli& c) {
  const lrcov::RegressionData data = load(c.est_in);
  const lrcov::KernelSpec kernel = lrcov::kernel_from_name(c.est_kernel);
  lrcov::CovCurve curve = lrcov::debiased_sigma(data, c.est_m, c.est_tau, kernel);
  if (c.est_threshold) curve = lrcov::threshold_pd(curve, data.n());
  if (format_from_name(c.est_format) == lrcov::ReportFormat::csv) {
    lrcov::write_text(c.est_out, lrcov::curve_to_csv(curve));
    return;
  }
  nlohmann::json values = nlohmann::json::array();
  nlohmann::json ts = nlohmann::json::array();
  for (int i = 1; i <= curve.n(); ++i) {
    ts.push_back(static_cast<double>(i) / curve.n());
    nlohmann::json flat = nlohmann::json::array();
    const Eigen::MatrixXd& M = curve.values[i - 1];
    for (int a = 0; a < curve.p(); ++a)
      for (int b = 0; b < curve.p(); ++b) flat.push_back(M(a, b));
    values.push_back(std::move(flat));
  }
  const nlohmann::json out{{"schema_version", lrcov::kSchemaVersion},
                           {"type", "curve"},
                           {"m", c.est_m},
                           {"tau", c.est_tau},
                           {"kernel", c.est_kernel},
                           {"thresholded", c.est_threshold},
                           {"p", curve.p()},
                           {"t", ts},
                           {"values", values}};
  lrcov::write_text(c.est_out, out.dump(2) + "\n");
}

void run_test_structural(const Cli& c) {
  const lrcov::RegressionData data = load(c.ts_in);
  lrcov::StructuralConfig cfg;
  if (c.ts_m_opt->count() > 0) cfg.m = c.ts_m;
  if (c.ts_tau_opt->count() > 0) cfg.tau = c.ts_tau;
  cfg.kernel = lrcov::kernel_from_name(c.ts_kernel);
  cfg.B = c.ts_B;
  cfg.B_mv = c.ts_Bmv;
  cfg.seed = c.ts_seed;
  cfg.auto_tune = c.ts_auto;
  cfg.levels = parse_double_list(c.ts_levels, "levels");
  cfg.threads = c.ts_threads;
  lrcov::emit_report(lrcov::structural_test(data, cfg), lrcov::ReportFormat::json, c.ts_out);
}

void run_test_longmemory(const Cli& c) {
  const lrcov::RegressionData data = load(c.tl_in);
  lrcov::LmConfig cfg;
  if (c.tl_gcv && c.tl_b_opt->count() > 0)
    throw lrcov::Error(lrcov::Errc::bad_config, "--b and --gcv are mutually exclusive");
  if (c.tl_b_opt->count() > 0) cfg.b = c.tl_b;
  if (c.tl_eta_opt->count() > 0) cfg.eta = c.tl_eta;
  if (c.tl_m_opt->count() > 0) cfg.m = c.tl_m;
  if (c.tl_tau_opt->count() > 0) cfg.tau = c.tl_tau;
  cfg.kernel = lrcov::kernel_from_name(c.tl_kernel);
  cfg.B = c.tl_B;
  cfg.B_mv = c.tl_Bmv;
  cfg.seed = c.tl_seed;
  cfg.auto_tune = c.tl_auto;
  cfg.criterion = lm_criterion_from_name(c.tl_criterion);
  cfg.threads = c.tl_threads;
  lrcov::emit_report(lrcov::longmemory_test(data, cfg), lrcov::ReportFormat::json, c.tl_out);
}

void run_select_tuning(const Cli& c) {
  const lrcov::RegressionData data = load(c.st_in);
  lrcov::TuningGrid grid = lrcov::grid_default(data.n());
  if (!c.st_mgrid.empty()) grid.m_values = parse_int_list(c.st_mgrid, "m-grid");
  if (!c.st_taugrid.empty()) grid.tau_values = parse_double_list(c.st_taugrid, "tau-grid");
  const lrcov::TuningSelection sel =
      lrcov::mv_select(data, grid, criterion_from_name(c.st_criterion), c.st_Bmv, c.st_seed,
                       lrcov::kernel_from_name(c.st_kernel), c.st_b, c.st_eta, c.st_threads);
  lrcov::emit_report(sel, lrcov::ReportFormat::json, c.st_out);
}

void run_simulate(const Cli& c) {
  if (!c.sim_delta.empty() && !c.sim_d.empty())
    throw Error(Errc::bad_config, "--delta and --d are mutually exclusive");
  std::vector<double> values{0.0};
  if (!c.sim_delta.empty()) values = parse_double_list(c.sim_delta, "delta");
  if (!c.sim_d.empty()) values = parse_double_list(c.sim_d, "d");
  const lrcov::Scenario scenario = lrcov::scenario_from_name(c.sim_scenario);

  if (c.sim_emit_data) {
    if (values.size() != 1)
      throw Error(Errc::bad_config, "--emit-data expects a single delta/d value");
    lrcov::ScenarioSpec spec;
    spec.name = scenario;
    spec.n = c.sim_n;
    spec.delta_or_d = values[0];
    spec.seed = c.sim_seed;
    spec.burn_in = c.sim_burn;
    lrcov::write_text(c.sim_out, lrcov::regression_to_csv(lrcov::gen_scenario(spec).data));
    return;
  }

  std::vector<lrcov::MonteCarloCell> cells;
  for (double v : values) cells.push_back({scenario, c.sim_n, v});
  lrcov::MonteCarloConfig cfg;
  cfg.test = c.sim_test == "structural" ? lrcov::McTest::structural
             : c.sim_test == "longmemory"
                 ? lrcov::McTest::longmemory
                 : throw Error(Errc::bad_config, "unknown test '" + c.sim_test +
                                                     "' (expected structural or longmemory)");
  cfg.replications = c.sim_reps;
  cfg.base_seed = c.sim_seed;
  cfg.levels = parse_double_list(c.sim_levels, "levels");
  if (c.sim_m_opt->count() > 0) cfg.m = c.sim_m;
  if (c.sim_tau_opt->count() > 0) cfg.tau = c.sim_tau;
  if (c.sim_b_opt->count() > 0) cfg.b = c.sim_b;
  if (c.sim_eta_opt->count() > 0) cfg.eta = c.sim_eta;
  cfg.kernel = lrcov::kernel_from_name(c.sim_kernel);
  cfg.B = c.sim_B;
  cfg.auto_tune = c.sim_auto;
  cfg.criterion = lm_criterion_from_name(c.sim_criterion);
  cfg.burn_in = c.sim_burn;
  cfg.threads = c.sim_threads;
  lrcov::emit_report(lrcov::monte_carlo(cells, cfg), format_from_name(c.sim_format),
                     c.sim_out);
}

void run_estimate_d(const Cli& c) {
  const lrcov::RegressionData data = load(c.ed_in);
  const std::vector<int> m_grid = parse_int_list(c.ed_mgrid, "m-grid");
  // Default bandwidth n^{-1/5}, capped below 1/2 for small samples. The
  // slope diagnostic wants a tighter bandwidth than the covariance
  // estimator's n^{-2/15} default so the pilot can track coefficient
  // curvature; an over-smoothed pilot leaves trend bias in the corrected
  // estimate and inflates the slope.
  const double tau =
      c.ed_tau > 0.0
          ? c.ed_tau
          : std::min(std::pow(static_cast<double>(data.n()), -0.2), 0.45);
  const lrcov::DSlopeFit fit =
      lrcov::estimate_d_slope(data, m_grid, tau, lrcov::kernel_from_name(c.ed_kernel));
  nlohmann::json points = nlohmann::json::array();
  for (const auto& [x, y] : fit.points) points.push_back(nlohmann::json::array({x, y}));
  const nlohmann::json out{{"schema_version", lrcov::kSchemaVersion},
                           {"type", "dslope"},
                           {"d_hat", fit.d_hat},
                           {"intercept", fit.intercept},
                           {"tau", tau},
                           {"points", points}};
  lrcov::write_text(c.ed_out, out.dump(2) + "\n");
}

} // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config_args(std::move(args));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }

  Cli c;
  CLI::App app{"Difference-based time-varying long-run covariance estimation "
               "and bootstrap specification tests"};
  app.require_subcommand(1);
  add_config_stub(&app, c.config_sink);

  CLI::App* est = app.add_subcommand("estimate", "debiased long-run covariance curve");
  add_ingest(est, c.est_in);
  est->add_option("--m", c.est_m, "difference window")->required();
  est->add_option("--tau", c.est_tau, "smoothing bandwidth in (0, 1/2)")->required();
  est->add_option("--kernel", c.est_kernel, "kernel family (default epanechnikov)");
  est->add_flag("--pd-threshold", c.est_threshold, "eigenvalue-threshold the curve to PD");
  est->add_option("--format", c.est_format, "csv (default) or json");
  est->add_option("--output", c.est_out, "output path (default stdout)");
  add_config_stub(est, c.config_sink);
  est->callback([&c] { run_estimate(c); });

  CLI::App* ts = app.add_subcommand("test-structural", "structural stability bootstrap test");
  add_ingest(ts, c.ts_in);
  c.ts_m_opt = ts->add_option("--m", c.ts_m, "difference window");
  c.ts_tau_opt = ts->add_option("--tau", c.ts_tau, "smoothing bandwidth");
  ts->add_flag("--auto-tune", c.ts_auto, "minimum-volatility selection of (m, tau)");
  ts->add_option("--B", c.ts_B, "bootstrap replicates (default 1000)");
  ts->add_option("--B-mv", c.ts_Bmv, "bootstrap replicates per tuning cell (default 100)");
  ts->add_option("--seed", c.ts_seed, "RNG seed");
  ts->add_option("--kernel", c.ts_kernel, "kernel family");
  ts->add_option("--levels", c.ts_levels, "comma-separated rejection levels");
  ts->add_option("--threads", c.ts_threads, "worker threads (default $LRCOV_THREADS or 1)");
  ts->add_option("--output", c.ts_out, "output path (default stdout)");
  add_config_stub(ts, c.config_sink);
  ts->callback([&c] { run_test_structural(c); });

  CLI::App* tl = app.add_subcommand("test-longmemory", "long memory bootstrap test");
  add_ingest(tl, c.tl_in);
  c.tl_b_opt = tl->add_option("--b", c.tl_b, "local linear bandwidth (default: GCV)");
  tl->add_flag("--gcv", c.tl_gcv, "select the bandwidth by GCV (the default)");
  c.tl_eta_opt = tl->add_option("--eta", c.tl_eta, "M-hat bandwidth (default n^{-1/5})");
  c.tl_m_opt = tl->add_option("--m", c.tl_m, "difference window");
  c.tl_tau_opt = tl->add_option("--tau", c.tl_tau, "smoothing bandwidth");
  tl->add_flag("--auto-tune", c.tl_auto, "minimum-volatility selection of (m, tau)");
  tl->add_option("--criterion", c.tl_criterion,
                 "statistic driving auto-tune: kpss (default), rs, vs or ks");
  tl->add_option("--B", c.tl_B, "bootstrap replicates (default 1000)");
  tl->add_option("--B-mv", c.tl_Bmv, "bootstrap replicates per tuning cell (default 100)");
  tl->add_option("--seed", c.tl_seed, "RNG seed");
  tl->add_option("--kernel", c.tl_kernel, "kernel family");
  tl->add_option("--threads", c.tl_threads, "worker threads (default $LRCOV_THREADS or 1)");
  tl->add_option("--output", c.tl_out, "output path (default stdout)");
  add_config_stub(tl, c.config_sink);
  tl->callback([&c] { run_test_longmemory(c); });

  CLI::App* st = app.add_subcommand("select-tuning", "extended minimum volatility selection");
  add_ingest(st, c.st_in);
  st->add_option("--criterion", c.st_criterion, "structural, kpss, rs, vs or ks")->required();
  st->add_option("--m-grid", c.st_mgrid, "m values: a,b,c or lo:hi (default: built-in grid)");
  st->add_option("--tau-grid", c.st_taugrid,
                 "tau values: a,b,c or lo:hi:step (default: built-in grid)");
  st->add_option("--B-mv", c.st_Bmv, "bootstrap replicates per cell (default 100)");
  st->add_option("--seed", c.st_seed, "RNG seed");
  st->add_option("--b", c.st_b, "long-memory trimming bandwidth (default: GCV)");
  st->add_option("--eta", c.st_eta, "long-memory M-hat bandwidth (default n^{-1/5})");
  st->add_option("--kernel", c.st_kernel, "kernel family");
  st->add_option("--threads", c.st_threads, "worker threads");
  st->add_option("--output", c.st_out, "output path (default stdout)");
  add_config_stub(st, c.config_sink);
  st->callback([&c] { run_select_tuning(c); });

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo study on built-in scenarios");
  sim->add_option("--scenario", c.sim_scenario, "CP1, CP2, CP4, M1, M1Viz or TrendA1")
      ->required();
  sim->add_option("--n", c.sim_n, "sample size (default 300)");
  sim->add_option("--delta", c.sim_delta, "break sizes: a,b,c or lo:hi:step (CP scenarios)");
  sim->add_option("--d", c.sim_d, "memory parameters: a,b,c or lo:hi:step (M1 scenarios)");
  sim->add_option("--test", c.sim_test, "structural (default) or longmemory");
  sim->add_option("--reps", c.sim_reps, "Monte Carlo replications (default 500)");
  sim->add_option("--seed", c.sim_seed, "base RNG seed");
  sim->add_option("--B", c.sim_B, "bootstrap replicates per test (default 200)");
  c.sim_m_opt = sim->add_option("--m", c.sim_m, "difference window");
  c.sim_tau_opt = sim->add_option("--tau", c.sim_tau, "smoothing bandwidth");
  sim->add_flag("--auto-tune", c.sim_auto, "minimum-volatility selection per replication");
  c.sim_b_opt = sim->add_option("--b", c.sim_b, "long-memory trimming bandwidth");
  c.sim_eta_opt = sim->add_option("--eta", c.sim_eta, "long-memory M-hat bandwidth");
  sim->add_option("--criterion", c.sim_criterion, "auto-tune statistic for longmemory");
  sim->add_option("--kernel", c.sim_kernel, "kernel family");
  sim->add_option("--levels", c.sim_levels, "comma-separated rejection levels");
  sim->add_option("--burn-in", c.sim_burn, "recursion burn-in (default 2000)");
  sim->add_option("--threads", c.sim_threads, "worker threads");
  sim->add_option("--format", c.sim_format, "json (default) or csv");
  sim->add_flag("--emit-data", c.sim_emit_data,
                "write one simulated dataset as CSV instead of running the study");
  sim->add_option("--output", c.sim_out, "output path (default stdout)");
  add_config_stub(sim, c.config_sink);
  sim->callback([&c] { run_simulate(c); });

  CLI::App* ed = app.add_subcommand("estimate-d", "slope-based memory parameter estimate");
  add_ingest(ed, c.ed_in);
  ed->add_option("--m-grid", c.ed_mgrid, "m values: a,b,c or lo:hi (default 8,12,16,24,32)");
  ed->add_option("--tau", c.ed_tau, "smoothing bandwidth (default n^{-1/5})");
  ed->add_option("--kernel", c.ed_kernel, "kernel family");
  ed->add_option("--output", c.ed_out, "output path (default stdout)");
  add_config_stub(ed, c.config_sink);
  ed->callback([&c] { run_estimate_d(c); });

  std::vector<const char*> cargv;
  cargv.push_back("lrcov");
  for (const std::string& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
