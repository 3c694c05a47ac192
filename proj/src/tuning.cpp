#include "lrcov/tuning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lrcov/estimator.hpp"
#include "lrcov/longmemory.hpp"
#include "lrcov/parallel.hpp"
#include "lrcov/rng.hpp"
#include "lrcov/structural.hpp"

namespace lrcov {

namespace {

double sample_variance(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / (n - 1);
}

const std::vector<double>& pick_stat(const LmDraws& draws, Criterion c) {
  switch (c) {
    case Criterion::kpss: return draws.kpss;
    case Criterion::rs: return draws.rs;
    case Criterion::vs: return draws.vs;
    case Criterion::ks: return draws.ks;
    default: break;
  }
  throw Error(Errc::bad_config, "criterion has no long-memory statistic");
}

} // namespace

TuningGrid grid_default(int n) {
  if (n < 50) throw Error(Errc::bad_config, "grid_default requires n >= 50");
  const double pw = std::pow(static_cast<double>(n), 4.0 / 15.0);
  int lo = std::max(static_cast<int>(std::floor(3.0 / 7.0 * pw)) - 1, 1);
  int hi = std::max(static_cast<int>(std::floor(11.0 / 7.0 * pw)) + 1, lo + 2);
  hi = std::min(hi, n / 4);
  lo = std::min(lo, hi);
  TuningGrid grid;
  for (int m = lo; m <= hi; ++m) grid.m_values.push_back(m);
  const double tau_lo = (2.0 / 3.0) * std::pow(static_cast<double>(n), -2.0 / 15.0);
  const double tau_hi = std::pow(static_cast<double>(n), -2.0 / 15.0);
  for (double v = tau_lo; v < tau_hi - 1e-9; v += 0.05) grid.tau_values.push_back(v);
  grid.tau_values.push_back(tau_hi);
  // n^{-2/15} exceeds 1/2 only for n < 182; keep every tau a valid bandwidth.
  for (double& t : grid.tau_values) t = std::min(t, 0.495);
  grid.tau_values.erase(
      std::unique(grid.tau_values.begin(), grid.tau_values.end(),
                  [](double a, double b) { return std::abs(a - b) < 1e-12; }),
      grid.tau_values.end());
  return grid;
}

Eigen::MatrixXd mv_table_from_s2(const Eigen::MatrixXd& s2) {
  const int rows = static_cast<int>(s2.rows()), cols = static_cast<int>(s2.cols());
  Eigen::MatrixXd mv = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double vals[5];
      int cnt = 0;
      const int di[5] = {0, 0, 0, -1, 1};
      const int dj[5] = {-1, 0, 1, 0, 0};
      for (int k = 0; k < 5; ++k) {
        const int a = i + di[k], b = j + dj[k];
        if (a < 0 || a >= rows || b < 0 || b >= cols) continue;
        vals[cnt++] = s2(a, b);
      }
      if (cnt < 2) continue;
      double mean = 0.0;
      for (int k = 0; k < cnt; ++k) mean += vals[k];
      mean /= cnt;
      double ss = 0.0;
      for (int k = 0; k < cnt; ++k) ss += (vals[k] - mean) * (vals[k] - mean);
      mv(i, j) = std::sqrt(ss / (cnt - 1));
    }
  }
  return mv;
}

std::pair<int, int> mv_argmin(const Eigen::MatrixXd& mv) {
  if (mv.size() == 0) throw Error(Errc::bad_config, "empty MV table");
  int bi = 0, bj = 0;
  double best = mv(0, 0);
  for (int i = 0; i < mv.rows(); ++i)
    for (int j = 0; j < mv.cols(); ++j)
      if (mv(i, j) < best) {
        best = mv(i, j);
        bi = i;
        bj = j;
      }
  return {bi, bj};
}

TuningSelection mv_select(const RegressionData& data, const TuningGrid& grid,
                          Criterion criterion, int B_mv, std::uint64_t seed,
                          const KernelSpec& kernel, double b, double eta, int threads) {
  const int n = data.n();
  const int M1 = static_cast<int>(grid.m_values.size());
  const int M2 = static_cast<int>(grid.tau_values.size());
  if (M1 < 1 || M2 < 1) throw Error(Errc::bad_config, "tuning grid is empty");
  if (B_mv < 2) throw Error(Errc::bad_config, "B_mv must be >= 2 to form a variance");
  if (!std::is_sorted(grid.m_values.begin(), grid.m_values.end()) ||
      !std::is_sorted(grid.tau_values.begin(), grid.tau_values.end()))
    throw Error(Errc::bad_config, "tuning grid values must be ascending");
  for (int m : grid.m_values)
    if (m < 1 || m > n / 4)
      throw Error(Errc::bad_config, "tuning grid m values must lie in [1, n/4]");
  for (double t : grid.tau_values)
    if (!(t > 0.0 && t < 0.5))
      throw Error(Errc::bad_config, "tuning grid tau values must lie in (0, 1/2)");

  // Long-memory criteria need resolved trimming/auxiliary bandwidths so that
  // every cell sees the same b and eta.
  double bb = b, ee = eta;
  if (criterion != Criterion::structural) {
    if (bb <= 0.0) bb = gcv_bandwidth(data, gcv_default_grid(), kernel);
    if (ee <= 0.0) ee = std::pow(static_cast<double>(n), -0.2);
  }

  Eigen::MatrixXd s2(M1, M2);
  parallel_for(M1 * M2, threads, [&](int idx) {
    const int i = idx / M2, j = idx % M2;
    const int m = grid.m_values[i];
    const double tau = grid.tau_values[j];
    const std::uint64_t cell_seed = Rng::derive(
        seed, {static_cast<std::uint64_t>(m), std::bit_cast<std::uint64_t>(tau)});
    const CovCurve sigma = threshold_pd(debiased_sigma(data, m, tau, kernel), n);
    if (criterion == Criterion::structural) {
      const CovCurve shalf = matrix_sqrt_curve(sigma);
      s2(i, j) = sample_variance(bootstrap_fr(data, shalf, B_mv, cell_seed, 1));
    } else {
      const LmDraws draws = bootstrap_lm(data, sigma, bb, ee, kernel, B_mv, cell_seed, 1);
      s2(i, j) = sample_variance(pick_stat(draws, criterion));
    }
  });

  TuningSelection sel;
  sel.s2_table = s2;
  sel.mv_table = mv_table_from_s2(s2);
  const auto [bi, bj] = mv_argmin(sel.mv_table);
  sel.m_star = grid.m_values[bi];
  sel.tau_star = grid.tau_values[bj];
  sel.grid = grid;
  return sel;
}

} // namespace lrcov
