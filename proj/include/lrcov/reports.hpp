#pragma once

#include <string>

#include "json.hpp"
#include "lrcov/longmemory.hpp"
#include "lrcov/simulate.hpp"
#include "lrcov/structural.hpp"
#include "lrcov/tuning.hpp"

namespace lrcov {

inline constexpr int kSchemaVersion = 1;

// JSON serialization (schema_version tagged, lossless round-trip).
nlohmann::json to_json(const TestReport& r);
nlohmann::json to_json(const LmTestReport& r);
nlohmann::json to_json(const MonteCarloReport& r);
nlohmann::json to_json(const TuningSelection& r);

TestReport test_report_from_json(const nlohmann::json& j);
LmTestReport lm_report_from_json(const nlohmann::json& j);
MonteCarloReport mc_report_from_json(const nlohmann::json& j);
TuningSelection tuning_from_json(const nlohmann::json& j);

// Tidy CSV of a Monte Carlo report: header
// scenario,n,value,stat,level,rate,ci_half_width,replications
// then one row per (cell, stat, level).
std::string mc_report_to_csv(const MonteCarloReport& r);

// Covariance curve as CSV: t,s11,s12,...,spp (row-major vec per grid point).
std::string curve_to_csv(const CovCurve& curve);

enum class ReportFormat { json, csv };

// Write text to path; "" or "-" writes to stdout. Throws io_error.
void write_text(const std::string& path, const std::string& text);

void emit_report(const TestReport& r, ReportFormat format, const std::string& path);
void emit_report(const LmTestReport& r, ReportFormat format, const std::string& path);
void emit_report(const MonteCarloReport& r, ReportFormat format, const std::string& path);
void emit_report(const TuningSelection& r, ReportFormat format, const std::string& path);

} // namespace lrcov
