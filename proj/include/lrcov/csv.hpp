#pragma once

#include <string>

#include "lrcov/data.hpp"

namespace lrcov {

struct IngestOptions {
    bool header = true;        // first row is column names
    bool add_intercept = true; // prepend a column of ones to X
    std::string y_column;      // name or empty = first column
};

// Parse a CSV body: response column + regressor columns. Throws Error with
// parse_error / non_numeric / too_few_rows codes on malformed input.
RegressionData parse_regression_csv(const std::string& text, const IngestOptions& opts = {});

// Read a file and parse it. Throws io_error if unreadable.
RegressionData ingest_csv(const std::string& path, const IngestOptions& opts = {});

// data as CSV text (y first, then x1..xp), with header.
std::string regression_to_csv(const RegressionData& data);

} // namespace lrcov
