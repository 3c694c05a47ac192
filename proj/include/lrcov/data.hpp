#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrcov {

// Error taxonomy. Every failure mode the library can signal carries one of
// these codes so the CLI can map it to a stable exit code.
enum class Errc {
  bad_config,            // invalid argument / precondition violation
  empty_window,          // all kernel weights zero
  window_too_large,      // m > floor(n/4)
  singular_omega,        // pilot Omega(t) not invertible anywhere
  singular_design,       // X'X (or Lambda(1)) not invertible
  singular_local_design, // local-linear system not invertible anywhere
  trim_too_large,        // n - 2*floor(n*b) < 2
  all_singular,          // no bandwidth in the GCV grid gives a valid fit
  singular_mhat,         // M-hat(t) not invertible
  not_psd,               // eigenvalue below -1e-10 in matrix_sqrt_psd
  parse_error,           // malformed CSV structure
  non_numeric,           // CSV cell is not a number
  too_few_rows,          // CSV has fewer than 50 data rows
  io_error               // file could not be read/written
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

// Response vector and covariate matrix of the functional linear model
// y_i = x_i' beta(t_i) + e_i on the grid t_i = i/n. The first covariate
// column is identically one.
struct RegressionData {
  Eigen::VectorXd y; // n responses
  Eigen::MatrixXd X; // n x p covariates, column 0 == 1

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// p x p symmetric matrix curve stored on the grid t_i = i/n (index i-1).
// Curves produced by the difference estimators are constant ("flattened")
// on [0, m/n] and [1 - m/n, 1].
struct CovCurve {
  std::vector<Eigen::MatrixXd> values;
  int m = 0;
  double tau = 0.0;

  int n() const { return static_cast<int>(values.size()); }
  int p() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
};

// Coefficient curve on the grid t_i = i/n: row i-1 of `values` is beta(t_i).
// `cond` holds the condition number diagnostic of the linear system solved at
// each point, `ridged` marks points where the ridge fallback fired and
// `flagged` marks points that stayed ill-conditioned and were filled by
// linear interpolation from the nearest well-conditioned neighbours.
struct CoefCurve {
  Eigen::MatrixXd values;
  Eigen::VectorXd cond;
  std::vector<std::uint8_t> ridged;
  std::vector<std::uint8_t> flagged;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

} // namespace lrcov
