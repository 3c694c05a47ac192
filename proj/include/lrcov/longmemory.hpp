#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lrcov/data.hpp"
#include "lrcov/kernels.hpp"
#include "lrcov/structural.hpp" // TuningUsed

namespace lrcov {

// The four long-memory statistics evaluated on residual partial sums
// S_r (r = n'+1..n-n', n' = floor(n*b)):
//   kpss = sum S_r^2 / (n (n-2n'))
//   rs   = max S_r - min S_r
//   vs   = { sum S_r^2 - (sum S_r)^2/(n-2n') } / (n (n-2n'))
//   ks   = max |S_r|
struct LmStatistics {
  double kpss = 0.0;
  double rs = 0.0;
  double vs = 0.0;
  double ks = 0.0;
  int n_prime = 0;
};

// Bootstrap draws per statistic (each length B, unsorted generation order).
struct LmDraws {
  std::vector<double> kpss, rs, vs, ks;
};

struct LmStatReport {
  double value = 0.0;
  std::vector<double> bootstrap_draws; // sorted ascending
  double p_value = 1.0;                // 1 - B*/B, B* = #{draw <= value}
};

struct LmTestReport {
  LmStatReport kpss, rs, vs, ks;
  TuningUsed tuning;
};

// Local linear estimate: at each grid point t solve the 2p x 2p kernel
// weighted normal equations of the fit y_i ~ x_i'eta0 + x_i'eta1 (t_i - t)
// and keep eta0. Ridge retry + interpolation as in the pilot estimator;
// throws singular_local_design when every point fails.
CoefCurve local_linear_fit(const RegressionData& data, double b, const KernelSpec& kernel);

// Jackknife bias-corrected fit 2 beta^_{b/sqrt(2)} - beta^_b.
CoefCurve jackknife_fit(const RegressionData& data, double b, const KernelSpec& kernel);

// Generalized cross validation over a bandwidth grid:
//   GCV(b) = (n^{-1} sum e^_i^2) / (1 - tr(H_b)/n)^2.
// Infeasible bandwidths (singular fits, tr(H_b) >= n, n - 2 floor(nb) < 2)
// are skipped; throws all_singular when nothing remains.
double gcv_bandwidth(const RegressionData& data, const std::vector<double>& grid,
                     const KernelSpec& kernel);

// Default GCV grid: 10 log-spaced bandwidths in [0.08, 0.35].
std::vector<double> gcv_default_grid();

// Partial sums S_r = sum_{i=n'+1}^r (y_i - x_i' beta(t_i)), r = n'+1..n-n'.
// Throws trim_too_large when n - 2n' < 2.
Eigen::VectorXd residual_partial_sums(const RegressionData& data, const CoefCurve& beta_curve,
                                      double b);

LmStatistics lm_statistics(const Eigen::VectorXd& partial_sums, int n, int n_prime);

// M^(t) = sum_i x_i x_i' K_eta(t_i - t*) / (n eta), t* = max(eta, min(t, 1-eta)).
CovCurve mhat_curve(const RegressionData& data, double eta, const KernelSpec& kernel);

// Multiplier bootstrap for the long-memory tests. sigma_star must be PSD on
// the grid (threshold upstream). Per replicate r, with V_j iid N(0, I_p):
//   G_k = - sum_j { (nb)^{-1} sum_{i=n'+1}^k x_i' M^{-1}(t_i) K*_b(t_i - t_j) }
//             Sigma*^{1/2}(t_j) V_j  +  sum_{i=n'+1}^k sigma_H(t_i) V_{i,1},
// sigma_H(t)^2 = (Sigma*(t))_{11}; the four statistics are evaluated on {G_k}.
LmDraws bootstrap_lm(const RegressionData& data, const CovCurve& sigma_star, double b,
                     double eta, const KernelSpec& kernel, int B, std::uint64_t seed,
                     int threads = 1);

enum class LmCriterion { kpss, rs, vs, ks };

struct LmConfig {
  std::optional<double> b;  // GCV when absent
  std::optional<double> eta; // n^{-1/5} when absent
  std::optional<int> m;
  std::optional<double> tau;
  KernelSpec kernel;
  int B = 1000;
  std::uint64_t seed = 0;
  bool auto_tune = false;
  LmCriterion criterion = LmCriterion::kpss; // MV criterion when auto_tune
  int B_mv = 100;
  int threads = 1;
};

LmTestReport longmemory_test(const RegressionData& data, const LmConfig& config);

} // namespace lrcov
