#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lrcov/data.hpp"
#include "lrcov/kernels.hpp"

namespace lrcov {

// Lag-m difference statistics. With Q_{k,m} = sum_{i=k}^{k+m-1} x_i y_i,
//   Delta_j       = (Q_{j-m+1,m} - Q_{j+1,m}) / m,
//   acute Delta_j = (1/m) sum_{i=j-m+1}^{j} Xt_{i,m} Xt_{i,m}',
//   breve Delta_j = (1/m) sum_{i=j-m+1}^{j} Xt_{i,m}' Yt_{i,m},
// where Xt_{i,m} = x_i x_i' - x_{i+m} x_{i+m}' and
// Yt_{i,m} = x_i y_i - x_{i+m} y_{i+m}. All sequences run j = m..n-m;
// row/slice j-m corresponds to index j.
struct DiffStats {
  int m = 0;
  Eigen::MatrixXd delta;              // (n-2m+1) x p
  std::vector<Eigen::MatrixXd> acute; // n-2m+1 matrices, p x p
  Eigen::MatrixXd breve;              // (n-2m+1) x p
};

// Throws window_too_large when m > floor(n/4); bad_config when m < 1.
DiffStats diff_stats(const RegressionData& data, int m);

// Biased difference-based estimator
//   Sigma'(t) = sum_{j=m}^{n-m} (m Delta_j Delta_j' / 2) w(t, j)
// on the grid t_i = i/n, flattened outside [m/n, 1-m/n]. PSD by construction.
CovCurve acute_sigma(const RegressionData& data, int m, double tau, const KernelSpec& kernel);

// Pilot coefficient curve beta(t) = Omega^{-1}(t) varpi(t), where
// Omega(t) smooths acute Delta_j / 2 with bandwidth tau and varpi(t) smooths
// breve Delta_j / 2 with bandwidth tau^{3/2}. Ill-conditioned points get a
// ridge retry, then interpolation; throws singular_omega when every grid
// point fails.
CoefCurve beta_pilot(const RegressionData& data, int m, double tau, const KernelSpec& kernel);

// Debiased estimator Sigma^(t) = Sigma'(t) - Sigma~(t) with
//   Sigma~(t) = sum_j (m A_{j,m} A_{j,m}' / 2) w(t, j),
//   A_{j,m} = (1/m) sum_{i=j-m+1}^{j} {x_i x_i' b(t_i) - x_{i+m} x_{i+m}' b(t_{i+m})},
// b = boundary-flattened pilot curve. Symmetric but not necessarily PSD.
CovCurve debiased_sigma(const RegressionData& data, int m, double tau, const KernelSpec& kernel);

// All intermediate curves of one debiased run (shared computation).
struct DebiasedFit {
  CovCurve acute;  // Sigma'
  CovCurve breve;  // Sigma~ (bias correction)
  CovCurve hat;    // Sigma^ = Sigma' - Sigma~
  CoefCurve pilot; // beta-breve
};
DebiasedFit debiased_fit(const RegressionData& data, int m, double tau, const KernelSpec& kernel);

// Eigenvalue thresholding: each matrix becomes U diag(max(lambda_i, 1/n)) U'.
CovCurve threshold_pd(const CovCurve& curve, int n);

// Symmetric PSD square root via eigendecomposition; eigenvalues in
// [-1e-10, 0) are clamped to zero, anything lower throws not_psd.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& M);

// Square root applied to every grid point of a curve.
CovCurve matrix_sqrt_curve(const CovCurve& curve);

} // namespace lrcov
