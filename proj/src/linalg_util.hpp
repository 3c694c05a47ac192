#pragma once

// Internal guarded symmetric solves shared by the pilot and local linear
// estimators: eigendecompose, check conditioning, retry once with a small
// ridge, and expose enough of the factorization for hat-matrix diagnostics.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lrcov/data.hpp"

namespace lrcov::detail {

inline constexpr double kCondLimit = 1e10;
inline constexpr double kRidgeScale = 1e-8;

struct SymSolve {
  Eigen::MatrixXd V;   // eigenvectors
  Eigen::VectorXd lam; // eigenvalues of the system actually solved
  double cond = std::numeric_limits<double>::infinity(); // of the original matrix
  bool ridged = false;
  bool ok = false;

  Eigen::VectorXd solve(const Eigen::VectorXd& v) const {
    Eigen::VectorXd c = V.transpose() * v;
    c.array() /= lam.array();
    return V * c;
  }

  // z' M^{-1} z for the solved system.
  double quad_inv(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd c = V.transpose() * z;
    return (c.array().square() / lam.array()).sum();
  }
};

// Solve preparation for symmetric M: if cond(M) > 1e10, retry once with
// M + eps I, eps = 1e-8 trace(M)/p; ok = false when still ill-conditioned.
inline SymSolve sym_solve(const Eigen::MatrixXd& M) {
  const int p = static_cast<int>(M.rows());
  SymSolve res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) return res;
  const double lmax = es.eigenvalues()[p - 1], lmin = es.eigenvalues()[0];
  res.cond = lmin > 0.0 && lmax > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  double shift = 0.0;
  if (!(res.cond <= kCondLimit)) {
    shift = kRidgeScale * M.trace() / p;
    const double smin = lmin + shift, smax = lmax + shift;
    const double cond2 =
        smin > 0.0 && smax > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond2 <= kCondLimit)) return res;
    res.ridged = true;
  }
  res.V = es.eigenvectors();
  res.lam = es.eigenvalues().array() + shift;
  res.ok = true;
  return res;
}

// Fill flagged rows (1-based grid indices lo..hi) by linear interpolation in
// the grid index from the nearest unflagged rows; constant beyond the ends.
// Throws `all_bad` when every point in the range is flagged.
inline void interpolate_flagged(Eigen::MatrixXd& values,
                                const std::vector<std::uint8_t>& flagged, int lo, int hi,
                                Errc all_bad) {
  std::vector<int> good;
  for (int i = lo; i <= hi; ++i)
    if (!flagged[i - 1]) good.push_back(i);
  if (good.empty())
    throw Error(all_bad, "linear system is ill-conditioned at every grid point");
  for (int i = lo; i <= hi; ++i) {
    if (!flagged[i - 1]) continue;
    auto right = std::lower_bound(good.begin(), good.end(), i);
    if (right == good.begin()) {
      values.row(i - 1) = values.row(good.front() - 1);
    } else if (right == good.end()) {
      values.row(i - 1) = values.row(good.back() - 1);
    } else {
      const int r = *right, l = *(right - 1);
      const double w = static_cast<double>(i - l) / (r - l);
      values.row(i - 1) = (1.0 - w) * values.row(l - 1) + w * values.row(r - 1);
    }
  }
}

} // namespace lrcov::detail
