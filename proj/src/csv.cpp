#include "lrcov/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace lrcov {

namespace {

constexpr int kMinRows = 50;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_cell(const std::string& raw, int row, int col) {
  const std::string s = trim(raw);
  if (!s.empty()) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) return value;
  }
  throw Error(Errc::non_numeric, "row " + std::to_string(row) + ", column " +
                                     std::to_string(col) + ": '" + s + "' is not numeric");
}

std::string format_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, buf + len);
}

} // namespace

RegressionData parse_regression_csv(const std::string& text, const IngestOptions& opts) {
  std::vector<std::string> lines;
  {
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur)) {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      if (trim(cur).empty()) continue;
      lines.push_back(cur);
    }
  }
  if (lines.empty()) throw Error(Errc::parse_error, "CSV input is empty");

  std::size_t first_data = 0;
  std::vector<std::string> names;
  if (opts.header) {
    for (const std::string& f : split_fields(lines[0])) names.push_back(trim(f));
    first_data = 1;
  } else if (!opts.y_column.empty()) {
    throw Error(Errc::bad_config, "y_column requires a header row");
  }

  const std::size_t nrows = lines.size() - first_data;
  if (nrows == 0) throw Error(Errc::parse_error, "CSV has a header but no data rows");
  const std::size_t ncols =
      opts.header ? names.size() : split_fields(lines[first_data]).size();
  if (ncols < 1) throw Error(Errc::parse_error, "CSV has no columns");

  std::size_t y_idx = 0;
  if (!opts.y_column.empty()) {
    const auto it = std::find(names.begin(), names.end(), opts.y_column);
    if (it == names.end())
      throw Error(Errc::bad_config, "response column '" + opts.y_column + "' not found");
    y_idx = static_cast<std::size_t>(it - names.begin());
  }

  Eigen::MatrixXd table(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::vector<std::string> fields = split_fields(lines[first_data + r]);
    const int file_row = static_cast<int>(first_data + r + 1);
    if (fields.size() != ncols)
      throw Error(Errc::parse_error, "row " + std::to_string(file_row) + " has " +
                                         std::to_string(fields.size()) + " fields, expected " +
                                         std::to_string(ncols));
    for (std::size_t c = 0; c < ncols; ++c)
      table(r, c) = parse_cell(fields[c], file_row, static_cast<int>(c + 1));
  }
  if (nrows < kMinRows)
    throw Error(Errc::too_few_rows, "need at least " + std::to_string(kMinRows) +
                                        " data rows, got " + std::to_string(nrows));

  RegressionData data;
  data.y = table.col(static_cast<Eigen::Index>(y_idx));
  Eigen::MatrixXd covs(nrows, ncols - 1);
  {
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < ncols; ++c)
      if (c != y_idx) covs.col(k++) = table.col(static_cast<Eigen::Index>(c));
  }
  bool has_ones = false;
  for (Eigen::Index c = 0; c < covs.cols() && !has_ones; ++c)
    has_ones = (covs.col(c).array() == 1.0).all();
  if (opts.add_intercept && !has_ones) {
    data.X.resize(static_cast<Eigen::Index>(nrows), covs.cols() + 1);
    data.X.col(0).setOnes();
    data.X.rightCols(covs.cols()) = covs;
  } else {
    if (covs.cols() == 0)
      throw Error(Errc::parse_error, "CSV needs at least one covariate column");
    data.X = covs;
  }
  return data;
}

RegressionData ingest_csv(const std::string& path, const IngestOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_error, "failed while reading '" + path + "'");
  return parse_regression_csv(buf.str(), opts);
}

std::string regression_to_csv(const RegressionData& data) {
  std::string out = "y";
  for (int c = 1; c <= data.p(); ++c) out += ",x" + std::to_string(c);
  out += "\n";
  for (int r = 0; r < data.n(); ++r) {
    out += format_double(data.y[r]);
    for (int c = 0; c < data.p(); ++c) {
      out += ',';
      out += format_double(data.X(r, c));
    }
    out += "\n";
  }
  return out;
}

} // namespace lrcov
