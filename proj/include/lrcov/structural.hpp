#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lrcov/data.hpp"
#include "lrcov/kernels.hpp"

namespace lrcov {

// Tuning parameters actually used by a test run (recorded in reports).
struct TuningUsed {
  int m = 0;
  double tau = 0.0;
  double b = 0.0;   // long-memory only
  double eta = 0.0; // long-memory only
  std::string kernel;
  int B = 0;
  std::uint64_t seed = 0;
  bool auto_tuned = false;
};

struct TestReport {
  double statistic = 0.0;                // T_n
  std::vector<double> bootstrap_draws;   // F_r, sorted ascending
  double p_value = 1.0;                  // 1 - #{F_(r) <= T_n}/B
  std::map<double, bool> reject_at;      // level -> T_n > F_(floor((1-level)B))
  TuningUsed tuning;
};

// Ordinary least squares; throws singular_design when X has deficient rank.
Eigen::VectorXd ols_fit(const RegressionData& data);

// T_n = max_{1<=j<=n} | sum_{i<=j} e^_i x_i / sqrt(n) |_2 with OLS residuals e^.
double tn_statistic(const RegressionData& data);

// Multiplier bootstrap draws
//   F_r = max_{m<=i<=n-m+1} | Psi_i - Lambda(i/n) Lambda^{-1}(1) Psi_{n-m+1} |_2,
//   Psi_i = n^{-1/2} sum_{j<=i} S(t_j) R_j,  Lambda(i/n) = sum_{j<=i} x_j x_j'/n,
// where S is the matrix square-root curve of the (thresholded) estimate and
// R_j are iid N(0, I_p) regenerated per replicate from substream (seed, r).
std::vector<double> bootstrap_fr(const RegressionData& data, const CovCurve& sigma_half,
                                 int B, std::uint64_t seed, int threads = 1);

struct StructuralConfig {
  std::optional<int> m;
  std::optional<double> tau;
  KernelSpec kernel;
  int B = 1000;
  std::uint64_t seed = 0;
  bool auto_tune = false;
  int B_mv = 100; // bootstrap runs per tuning-grid cell when auto_tune
  std::vector<double> levels{0.05, 0.10};
  int threads = 1;
};

// Composite structural-stability test: OLS gradient CUSUM statistic against
// multiplier bootstrap draws driven by the debiased, PD-thresholded estimate.
TestReport structural_test(const RegressionData& data, const StructuralConfig& config);

} // namespace lrcov
