#include "lrcov/reports.hpp"

#include <charconv>
#include <fstream>
#include <iostream>

namespace lrcov {

namespace {

using nlohmann::json;

// Shortest round-trip decimal form; keeps JSON keys like "0.05" readable.
std::string fmt_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

json to_json_matrix(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = j.at(r).at(c).get<double>();
  return M;
}

json tuning_to_json(const TuningUsed& t) {
  return json{{"m", t.m},           {"tau", t.tau}, {"b", t.b},
              {"eta", t.eta},       {"kernel", t.kernel},
              {"B", t.B},           {"seed", t.seed},
              {"auto_tuned", t.auto_tuned}};
}

TuningUsed tuning_used_from_json(const json& j) {
  TuningUsed t;
  t.m = j.at("m").get<int>();
  t.tau = j.at("tau").get<double>();
  t.b = j.at("b").get<double>();
  t.eta = j.at("eta").get<double>();
  t.kernel = j.at("kernel").get<std::string>();
  t.B = j.at("B").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.auto_tuned = j.at("auto_tuned").get<bool>();
  return t;
}

json stat_report_to_json(const LmStatReport& r) {
  return json{{"value", r.value},
              {"p_value", r.p_value},
              {"bootstrap_draws", r.bootstrap_draws}};
}

LmStatReport stat_report_from_json(const json& j) {
  LmStatReport r;
  r.value = j.at("value").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.bootstrap_draws = j.at("bootstrap_draws").get<std::vector<double>>();
  return r;
}

void check_header(const json& j, const char* type) {
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw Error(Errc::parse_error, "unsupported schema_version in report");
  if (j.at("type").get<std::string>() != type)
    throw Error(Errc::parse_error, std::string("expected a '") + type + "' report");
}

[[noreturn]] void rethrow_as_parse(const json::exception& e) {
  throw Error(Errc::parse_error, std::string("malformed report JSON: ") + e.what());
}

} // namespace

json to_json(const TestReport& r) {
  json reject = json::object();
  for (const auto& [level, decision] : r.reject_at) reject[fmt_double(level)] = decision;
  return json{{"schema_version", kSchemaVersion},
              {"type", "structural"},
              {"statistic", r.statistic},
              {"p_value", r.p_value},
              {"bootstrap_draws", r.bootstrap_draws},
              {"reject_at", reject},
              {"tuning", tuning_to_json(r.tuning)}};
}

json to_json(const LmTestReport& r) {
  return json{{"schema_version", kSchemaVersion},
              {"type", "longmemory"},
              {"tests",
               json{{"kpss", stat_report_to_json(r.kpss)},
                    {"rs", stat_report_to_json(r.rs)},
                    {"vs", stat_report_to_json(r.vs)},
                    {"ks", stat_report_to_json(r.ks)}}},
              {"tuning", tuning_to_json(r.tuning)}};
}

json to_json(const MonteCarloReport& r) {
  json cells = json::array();
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    cells.push_back(json{{"scenario", scenario_name(r.cells[c].scenario)},
                         {"n", r.cells[c].n},
                         {"value", r.cells[c].value},
                         {"rates", to_json_matrix(r.rates[c])},
                         {"ci_half_width", to_json_matrix(r.ci_half[c])},
                         {"pvalues", to_json_matrix(r.pvalues[c])}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"type", "monte_carlo"},
              {"replications", r.replications},
              {"base_seed", r.base_seed},
              {"stats", r.stats},
              {"levels", r.levels},
              {"cells", cells}};
}

json to_json(const TuningSelection& r) {
  return json{{"schema_version", kSchemaVersion},
              {"type", "tuning"},
              {"m_star", r.m_star},
              {"tau_star", r.tau_star},
              {"m_values", r.grid.m_values},
              {"tau_values", r.grid.tau_values},
              {"s2_table", to_json_matrix(r.s2_table)},
              {"mv_table", to_json_matrix(r.mv_table)}};
}

TestReport test_report_from_json(const json& j) {
  try {
    check_header(j, "structural");
    TestReport r;
    r.statistic = j.at("statistic").get<double>();
    r.p_value = j.at("p_value").get<double>();
    r.bootstrap_draws = j.at("bootstrap_draws").get<std::vector<double>>();
    for (const auto& [key, value] : j.at("reject_at").items())
      r.reject_at[std::stod(key)] = value.get<bool>();
    r.tuning = tuning_used_from_json(j.at("tuning"));
    return r;
  } catch (const json::exception& e) {
    rethrow_as_parse(e);
  }
}

LmTestReport lm_report_from_json(const json& j) {
  try {
    check_header(j, "longmemory");
    LmTestReport r;
    const json& tests = j.at("tests");
    r.kpss = stat_report_from_json(tests.at("kpss"));
    r.rs = stat_report_from_json(tests.at("rs"));
    r.vs = stat_report_from_json(tests.at("vs"));
    r.ks = stat_report_from_json(tests.at("ks"));
    r.tuning = tuning_used_from_json(j.at("tuning"));
    return r;
  } catch (const json::exception& e) {
    rethrow_as_parse(e);
  }
}

MonteCarloReport mc_report_from_json(const json& j) {
  try {
    check_header(j, "monte_carlo");
    MonteCarloReport r;
    r.replications = j.at("replications").get<int>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.stats = j.at("stats").get<std::vector<std::string>>();
    r.levels = j.at("levels").get<std::vector<double>>();
    for (const json& cell : j.at("cells")) {
      MonteCarloCell mc;
      mc.scenario = scenario_from_name(cell.at("scenario").get<std::string>());
      mc.n = cell.at("n").get<int>();
      mc.value = cell.at("value").get<double>();
      r.cells.push_back(mc);
      r.rates.push_back(matrix_from_json(cell.at("rates")));
      r.ci_half.push_back(matrix_from_json(cell.at("ci_half_width")));
      r.pvalues.push_back(matrix_from_json(cell.at("pvalues")));
    }
    return r;
  } catch (const json::exception& e) {
    rethrow_as_parse(e);
  }
}

TuningSelection tuning_from_json(const json& j) {
  try {
    check_header(j, "tuning");
    TuningSelection r;
    r.m_star = j.at("m_star").get<int>();
    r.tau_star = j.at("tau_star").get<double>();
    r.grid.m_values = j.at("m_values").get<std::vector<int>>();
    r.grid.tau_values = j.at("tau_values").get<std::vector<double>>();
    r.s2_table = matrix_from_json(j.at("s2_table"));
    r.mv_table = matrix_from_json(j.at("mv_table"));
    return r;
  } catch (const json::exception& e) {
    rethrow_as_parse(e);
  }
}

std::string mc_report_to_csv(const MonteCarloReport& r) {
  std::string out = "scenario,n,value,stat,level,rate,ci_half_width,replications\n";
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    for (std::size_t s = 0; s < r.stats.size(); ++s) {
      for (std::size_t l = 0; l < r.levels.size(); ++l) {
        out += scenario_name(r.cells[c].scenario);
        out += ',' + std::to_string(r.cells[c].n);
        out += ',' + fmt_double(r.cells[c].value);
        out += ',' + r.stats[s];
        out += ',' + fmt_double(r.levels[l]);
        out += ',' + fmt_double(r.rates[c](static_cast<Eigen::Index>(s),
                                           static_cast<Eigen::Index>(l)));
        out += ',' + fmt_double(r.ci_half[c](static_cast<Eigen::Index>(s),
                                             static_cast<Eigen::Index>(l)));
        out += ',' + std::to_string(r.replications);
        out += '\n';
      }
    }
  }
  return out;
}

std::string curve_to_csv(const CovCurve& curve) {
  const int n = curve.n(), p = curve.p();
  std::string out = "t";
  for (int a = 1; a <= p; ++a)
    for (int b = 1; b <= p; ++b)
      out += ",s" + std::to_string(a) + std::to_string(b);
  out += "\n";
  for (int i = 1; i <= n; ++i) {
    out += fmt_double(static_cast<double>(i) / n);
    const Eigen::MatrixXd& M = curve.values[i - 1];
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) out += ',' + fmt_double(M(a, b));
    out += "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::io_error, "failed while writing '" + path + "'");
}

namespace {

template <typename Report>
void emit_json_only(const Report& r, ReportFormat format, const std::string& path,
                    const char* what) {
  if (format == ReportFormat::csv)
    throw Error(Errc::bad_config,
                std::string("CSV output is not defined for ") + what + " reports");
  write_text(path, to_json(r).dump(2) + "\n");
}

} // namespace

void emit_report(const TestReport& r, ReportFormat format, const std::string& path) {
  emit_json_only(r, format, path, "structural test");
}

void emit_report(const LmTestReport& r, ReportFormat format, const std::string& path) {
  emit_json_only(r, format, path, "long-memory test");
}

void emit_report(const MonteCarloReport& r, ReportFormat format, const std::string& path) {
  if (format == ReportFormat::csv) {
    write_text(path, mc_report_to_csv(r));
    return;
  }
  write_text(path, to_json(r).dump(2) + "\n");
}

void emit_report(const TuningSelection& r, ReportFormat format, const std::string& path) {
  emit_json_only(r, format, path, "tuning selection");
}

} // namespace lrcov
