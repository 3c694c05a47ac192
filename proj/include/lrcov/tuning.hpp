#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lrcov/data.hpp"
#include "lrcov/kernels.hpp"

namespace lrcov {

struct TuningGrid {
  std::vector<int> m_values;      // ascending
  std::vector<double> tau_values; // ascending
};

// Recommended grids:
//   m   from max(floor((3/7) n^{4/15}) - 1, 1)
//       to   max(floor((11/7) n^{4/15}) + 1, lower + 2),
//   tau from (2/3) n^{-2/15} in steps of 0.05 up to n^{-2/15}, right endpoint
//       always included. Values are capped below 1/2 (small n only).
TuningGrid grid_default(int n);

// Which bootstrap statistic drives the minimum-volatility criterion.
enum class Criterion { structural, kpss, rs, vs, ks };

struct TuningSelection {
  int m_star = 0;
  double tau_star = 0.0;
  Eigen::MatrixXd mv_table; // rows = m, cols = tau
  Eigen::MatrixXd s2_table;
  TuningGrid grid; // the grid the tables are indexed by
};

// MV smoothing step: mv(i,j) is the sample standard deviation of the in-grid
// neighborhood {s2(i,j-1), s2(i,j), s2(i,j+1), s2(i-1,j), s2(i+1,j)}, each
// cell counted once and off-grid neighbors dropped; fewer than two members
// gives 0.
Eigen::MatrixXd mv_table_from_s2(const Eigen::MatrixXd& s2);

// (row, col) of the minimum entry; ties break toward the smaller row, then
// the smaller column.
std::pair<int, int> mv_argmin(const Eigen::MatrixXd& mv);

// Extended minimum volatility selection: s2(i,j) is the sample variance of
// B_mv bootstrap statistics computed with (m_i, tau_j); the winner minimizes
// mv_table_from_s2. Each cell draws from a substream keyed by its (m, tau)
// values, so adding or removing unrelated grid rows/columns does not change
// the statistics of the remaining cells. b/eta are the long-memory
// parameters (ignored for the structural criterion); b < 0 means GCV,
// eta < 0 means the n^{-1/5} default.
TuningSelection mv_select(const RegressionData& data, const TuningGrid& grid,
                          Criterion criterion, int B_mv, std::uint64_t seed,
                          const KernelSpec& kernel = {}, double b = -1.0,
                          double eta = -1.0, int threads = 1);

} // namespace lrcov
