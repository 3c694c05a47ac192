#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrcov/rng.hpp"
#include "lrcov/tuning.hpp"

using lrcov::Criterion;
using lrcov::Errc;
using lrcov::Error;
using lrcov::KernelSpec;
using lrcov::RegressionData;
using lrcov::TuningGrid;

namespace {

bool eqm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

RegressionData null_data(int n, std::uint64_t seed) {
  lrcov::Rng rng(seed);
  RegressionData data;
  data.X.resize(n, 2);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.X(i, 0) = 1.0;
    data.X(i, 1) = rng.next_normal();
    data.y[i] = 1.0 + data.X(i, 1) + rng.next_normal();
  }
  return data;
}

} // namespace

TEST_SUITE_BEGIN("tuning");

TEST_CASE("default grid at n = 300 follows the rate rules") {
  const TuningGrid g = lrcov::grid_default(300);
  // 300^{4/15} ~ 4.577: m from max(floor(3/7*.)-1,1)=1 to floor(11/7*.)+1=8.
  REQUIRE(g.m_values.size() == 8);
  CHECK(g.m_values.front() == 1);
  CHECK(g.m_values.back() == 8);
  for (std::size_t i = 1; i < g.m_values.size(); ++i)
    CHECK(g.m_values[i] == g.m_values[i - 1] + 1);

  const double hi = std::pow(300.0, -2.0 / 15.0);
  const double lo = 2.0 / 3.0 * hi;
  REQUIRE(g.tau_values.size() == 5);
  CHECK(g.tau_values.front() == doctest::Approx(lo).epsilon(1e-12));
  CHECK(g.tau_values.back() == doctest::Approx(hi).epsilon(1e-12));
  for (std::size_t i = 1; i + 1 < g.tau_values.size(); ++i)
    CHECK(g.tau_values[i] == doctest::Approx(lo + 0.05 * i).epsilon(1e-12));
  CHECK(std::is_sorted(g.tau_values.begin(), g.tau_values.end()));
}

TEST_CASE("default grid caps tau below one half for small n") {
  const TuningGrid g = lrcov::grid_default(50);
  for (double t : g.tau_values) {
    CHECK(t > 0.0);
    CHECK(t <= 0.495);
  }
  // Deduplication keeps the values strictly increasing.
  for (std::size_t i = 1; i < g.tau_values.size(); ++i)
    CHECK(g.tau_values[i] > g.tau_values[i - 1]);
  for (int m : g.m_values) {
    CHECK(m >= 1);
    CHECK(m <= 12); // n/4
  }
  try {
    lrcov::grid_default(49);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
}

TEST_CASE("MV smoothing table matches a direct computation") {
  Eigen::MatrixXd s2(3, 4);
  s2 << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0;
  const Eigen::MatrixXd mv = lrcov::mv_table_from_s2(s2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::vector<double> nb;
      const std::pair<int, int> offsets[5] = {{0, -1}, {0, 0}, {0, 1}, {-1, 0}, {1, 0}};
      for (auto [di, dj] : offsets) {
        const int a = i + di, b = j + dj;
        if (a >= 0 && a < 3 && b >= 0 && b < 4) nb.push_back(s2(a, b));
      }
      double mean = 0.0;
      for (double v : nb) mean += v;
      mean /= nb.size();
      double ss = 0.0;
      for (double v : nb) ss += (v - mean) * (v - mean);
      const double want = nb.size() < 2 ? 0.0 : std::sqrt(ss / (nb.size() - 1));
      CHECK(mv(i, j) == doctest::Approx(want).epsilon(1e-14));
    }
  }
}

TEST_CASE("a flat neighborhood wins the MV criterion") {
  // Make the neighborhood of (1,1) perfectly flat; everything else noisy.
  Eigen::MatrixXd s2(3, 3);
  s2 << 5.0, 2.0, 9.0, 2.0, 2.0, 2.0, 7.0, 2.0, 4.0;
  const Eigen::MatrixXd mv = lrcov::mv_table_from_s2(s2);
  CHECK(mv(1, 1) == 0.0);
  const auto [i, j] = lrcov::mv_argmin(mv);
  CHECK(i == 1);
  CHECK(j == 1);
}

TEST_CASE("argmin ties break toward the smaller row, then column") {
  Eigen::MatrixXd mv(2, 2);
  mv << 1.0, 0.5, 0.5, 2.0;
  const auto [i, j] = lrcov::mv_argmin(mv);
  CHECK(i == 0);
  CHECK(j == 1);
  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(3, 3);
  const auto [i2, j2] = lrcov::mv_argmin(flat);
  CHECK(i2 == 0);
  CHECK(j2 == 0);
}

TEST_CASE("selection is deterministic and reports a consistent table") {
  const RegressionData data = null_data(120, 17);
  TuningGrid grid;
  grid.m_values = {2, 3};
  grid.tau_values = {0.35, 0.40};
  const lrcov::TuningSelection s1 =
      lrcov::mv_select(data, grid, Criterion::structural, 20, 5);
  const lrcov::TuningSelection s2 =
      lrcov::mv_select(data, grid, Criterion::structural, 20, 5);
  CHECK(eqm(s1.s2_table, s2.s2_table));
  CHECK(s1.m_star == s2.m_star);
  CHECK(s1.tau_star == s2.tau_star);

  REQUIRE(s1.s2_table.rows() == 2);
  REQUIRE(s1.s2_table.cols() == 2);
  CHECK(s1.s2_table.minCoeff() >= 0.0);
  CHECK((s1.mv_table - lrcov::mv_table_from_s2(s1.s2_table)).cwiseAbs().maxCoeff() == 0.0);
  const auto [bi, bj] = lrcov::mv_argmin(s1.mv_table);
  CHECK(s1.m_star == grid.m_values[bi]);
  CHECK(s1.tau_star == grid.tau_values[bj]);
  CHECK(std::find(grid.m_values.begin(), grid.m_values.end(), s1.m_star) !=
        grid.m_values.end());

  // A multi-thread run reproduces the single-thread tables bit for bit.
  const lrcov::TuningSelection s3 =
      lrcov::mv_select(data, grid, Criterion::structural, 20, 5, KernelSpec{}, -1.0, -1.0, 4);
  CHECK(eqm(s1.s2_table, s3.s2_table));
}

TEST_CASE("cell statistics are keyed by (m, tau) values, not grid positions") {
  // Dropping a row/column must leave the remaining cells' s2 untouched.
  const RegressionData data = null_data(120, 23);
  TuningGrid big;
  big.m_values = {2, 3, 4};
  big.tau_values = {0.30, 0.35, 0.40};
  TuningGrid small;
  small.m_values = {2, 3};        // dropped m = 4
  small.tau_values = {0.30, 0.40}; // dropped tau = 0.35
  const lrcov::TuningSelection sb = lrcov::mv_select(data, big, Criterion::structural, 15, 77);
  const lrcov::TuningSelection ss =
      lrcov::mv_select(data, small, Criterion::structural, 15, 77);
  CHECK(ss.s2_table(0, 0) == sb.s2_table(0, 0));
  CHECK(ss.s2_table(0, 1) == sb.s2_table(0, 2));
  CHECK(ss.s2_table(1, 0) == sb.s2_table(1, 0));
  CHECK(ss.s2_table(1, 1) == sb.s2_table(1, 2));
}

TEST_CASE("long-memory criteria run end to end") {
  const RegressionData data = null_data(120, 29);
  TuningGrid grid;
  grid.m_values = {2, 3};
  grid.tau_values = {0.35, 0.40};
  const lrcov::TuningSelection sel =
      lrcov::mv_select(data, grid, Criterion::kpss, 10, 3, KernelSpec{}, 0.2, 0.2);
  CHECK(sel.s2_table.minCoeff() >= 0.0);
  CHECK((sel.m_star == 2 || sel.m_star == 3));
  // Explicit b/eta make the run independent of the GCV path.
  const lrcov::TuningSelection again =
      lrcov::mv_select(data, grid, Criterion::kpss, 10, 3, KernelSpec{}, 0.2, 0.2);
  CHECK(eqm(sel.s2_table, again.s2_table));
}

TEST_CASE("grid validation") {
  const RegressionData data = null_data(100, 31);
  TuningGrid grid;
  try {
    lrcov::mv_select(data, grid, Criterion::structural, 10, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  grid.m_values = {2, 3};
  grid.tau_values = {0.35};
  try {
    lrcov::mv_select(data, grid, Criterion::structural, 1, 1); // B_mv too small
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  TuningGrid bad = grid;
  bad.m_values = {3, 2}; // not ascending
  try {
    lrcov::mv_select(data, bad, Criterion::structural, 10, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  TuningGrid huge = grid;
  huge.m_values = {2, 26}; // 26 > n/4
  try {
    lrcov::mv_select(data, huge, Criterion::structural, 10, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
  TuningGrid wide = grid;
  wide.tau_values = {0.35, 0.6}; // tau must stay below 1/2
  try {
    lrcov::mv_select(data, wide, Criterion::structural, 10, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_config);
  }
}

TEST_CASE("default-grid selection on null data stays in range") {
  const RegressionData data = null_data(200, 41);
  const TuningGrid grid = lrcov::grid_default(200);
  const lrcov::TuningSelection sel =
      lrcov::mv_select(data, grid, Criterion::structural, 20, 11);
  CHECK(std::find(grid.m_values.begin(), grid.m_values.end(), sel.m_star) !=
        grid.m_values.end());
  CHECK(std::find(grid.tau_values.begin(), grid.tau_values.end(), sel.tau_star) !=
        grid.tau_values.end());
}

TEST_SUITE_END();
