#include "lrcov/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "linalg_util.hpp"

namespace lrcov {

namespace {

// Kernel values on the rescaled-time lattice: all curve evaluations happen at
// t_i = i/n, so K((t_j - t_i)/bw) depends on |j - i| only. kv[d] = K(d/(n*bw))
// and den[i-1] = sum_{l=1}^n kv[|l - i|] is the normalizing constant of
// omega(t_i, .), whose sum runs over the full grid l = 1..n.
struct GridSmoother {
  int n = 0;
  int radius = 0;
  std::vector<double> kv;
  std::vector<double> den;

  GridSmoother(const KernelSpec& kernel, int n_, double bw) : n(n_) {
    const double nb = n * bw;
    radius = static_cast<int>(std::min<double>(n, std::ceil(nb)));
    kv.assign(radius + 1, 0.0);
    for (int d = 0; d <= radius; ++d) kv[d] = kernel_eval(kernel, d / nb);
    den.assign(n, 0.0);
    for (int i = 1; i <= n; ++i) {
      double s = 0.0;
      const int lo = std::max(1, i - radius), hi = std::min(n, i + radius);
      for (int l = lo; l <= hi; ++l) s += kv[std::abs(l - i)];
      den[i - 1] = s;
    }
  }
};

void check_window(int n, int m) {
  if (m < 1) throw Error(Errc::bad_config, "difference window m must be >= 1");
  if (m > n / 4)
    throw Error(Errc::window_too_large,
                "difference window m = " + std::to_string(m) + " exceeds floor(n/4) with n = " +
                    std::to_string(n));
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 0.5))
    throw Error(Errc::bad_config, "bandwidth tau must lie in (0, 1/2)");
}

// Delta_j = (Q_{j-m+1,m} - Q_{j+1,m}) / m for j = m..n-m, row j-m.
Eigen::MatrixXd delta_sequence(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int m) {
  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(X.cols());
  Eigen::MatrixXd delta(n - 2 * m + 1, p);
  for (int j = m; j <= n - m; ++j) {
    Eigen::RowVectorXd q1 = Eigen::RowVectorXd::Zero(p);
    Eigen::RowVectorXd q2 = Eigen::RowVectorXd::Zero(p);
    for (int i = j - m + 1; i <= j; ++i) q1 += X.row(i - 1) * y[i - 1];
    for (int i = j + 1; i <= j + m; ++i) q2 += X.row(i - 1) * y[i - 1];
    delta.row(j - m) = (q1 - q2) / m;
  }
  return delta;
}

// sum_{j=m}^{n-m} (m d_j d_j' / 2) omega(t, j) on the grid, with the interior
// endpoints copied onto [0, m/n) and (1 - m/n, 1].
CovCurve smooth_rank1(const Eigen::MatrixXd& delta, int n, int m, double tau,
                      const KernelSpec& kernel) {
  const int p = static_cast<int>(delta.cols());
  GridSmoother sm(kernel, n, tau);
  CovCurve out;
  out.m = m;
  out.tau = tau;
  out.values.assign(n, Eigen::MatrixXd::Zero(p, p));
  for (int i = m; i <= n - m; ++i) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    const int lo = std::max(m, i - sm.radius), hi = std::min(n - m, i + sm.radius);
    for (int j = lo; j <= hi; ++j) {
      const double w = sm.kv[std::abs(j - i)];
      if (w != 0.0)
        acc.selfadjointView<Eigen::Lower>().rankUpdate(delta.row(j - m).transpose(), w);
    }
    Eigen::MatrixXd full = acc.selfadjointView<Eigen::Lower>();
    out.values[i - 1] = full * (0.5 * m / sm.den[i - 1]);
  }
  for (int i = 1; i < m; ++i) out.values[i - 1] = out.values[m - 1];
  for (int i = n - m + 1; i <= n; ++i) out.values[i - 1] = out.values[n - m - 1];
  return out;
}

// Pilot coefficient curve from precomputed difference statistics. Omega uses
// bandwidth tau, varpi uses tau^{3/2}; both weight sequences are normalized
// over the full grid, and the solved curve is flattened at the boundaries.
CoefCurve pilot_from_stats(const DiffStats& ds, int n, int p, double tau,
                           const KernelSpec& kernel) {
  const int m = ds.m;
  GridSmoother sm_omega(kernel, n, tau);
  GridSmoother sm_varpi(kernel, n, std::pow(tau, 1.5));
  CoefCurve out;
  out.values.setZero(n, p);
  out.cond.setZero(n);
  out.ridged.assign(n, 0);
  out.flagged.assign(n, 0);
  for (int i = m; i <= n - m; ++i) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd varpi = Eigen::VectorXd::Zero(p);
    {
      const int lo = std::max(m, i - sm_omega.radius), hi = std::min(n - m, i + sm_omega.radius);
      for (int j = lo; j <= hi; ++j) {
        const double w = sm_omega.kv[std::abs(j - i)];
        if (w != 0.0) omega += (0.5 * w) * ds.acute[j - m];
      }
      omega /= sm_omega.den[i - 1];
    }
    {
      const int lo = std::max(m, i - sm_varpi.radius), hi = std::min(n - m, i + sm_varpi.radius);
      for (int j = lo; j <= hi; ++j) {
        const double w = sm_varpi.kv[std::abs(j - i)];
        if (w != 0.0) varpi += (0.5 * w) * ds.breve.row(j - m).transpose();
      }
      varpi /= sm_varpi.den[i - 1];
    }
    detail::SymSolve sol = detail::sym_solve(omega);
    out.cond[i - 1] = sol.cond;
    out.ridged[i - 1] = sol.ridged ? 1 : 0;
    out.flagged[i - 1] = sol.ok ? 0 : 1;
    if (sol.ok) out.values.row(i - 1) = sol.solve(varpi).transpose();
  }
  detail::interpolate_flagged(out.values, out.flagged, m, n - m, Errc::singular_omega);
  for (int i = 1; i < m; ++i) {
    out.values.row(i - 1) = out.values.row(m - 1);
    out.cond[i - 1] = out.cond[m - 1];
    out.ridged[i - 1] = out.ridged[m - 1];
    out.flagged[i - 1] = out.flagged[m - 1];
  }
  for (int i = n - m + 1; i <= n; ++i) {
    out.values.row(i - 1) = out.values.row(n - m - 1);
    out.cond[i - 1] = out.cond[n - m - 1];
    out.ridged[i - 1] = out.ridged[n - m - 1];
    out.flagged[i - 1] = out.flagged[n - m - 1];
  }
  return out;
}

} // namespace

DiffStats diff_stats(const RegressionData& data, int m) {
  const int n = data.n(), p = data.p();
  check_window(n, m);
  const int cnt = n - 2 * m + 1;
  // Lag-m difference building blocks, i = 1..n-m (slot i-1).
  std::vector<Eigen::MatrixXd> xt(n - m);
  Eigen::MatrixXd yt(n - m, p);
  for (int i = 1; i <= n - m; ++i) {
    const auto xi = data.X.row(i - 1), xl = data.X.row(i + m - 1);
    xt[i - 1] = xi.transpose() * xi - xl.transpose() * xl;
    yt.row(i - 1) = xi * data.y[i - 1] - xl * data.y[i + m - 1];
  }
  DiffStats out;
  out.m = m;
  out.delta = delta_sequence(data.X, data.y, m);
  out.acute.assign(cnt, Eigen::MatrixXd::Zero(p, p));
  out.breve.setZero(cnt, p);
  for (int j = m; j <= n - m; ++j) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    for (int i = j - m + 1; i <= j; ++i) {
      a += xt[i - 1] * xt[i - 1].transpose();
      b += xt[i - 1].transpose() * yt.row(i - 1).transpose();
    }
    out.acute[j - m] = a / m;
    out.breve.row(j - m) = b.transpose() / m;
  }
  return out;
}

CovCurve acute_sigma(const RegressionData& data, int m, double tau, const KernelSpec& kernel) {
  check_window(data.n(), m);
  check_tau(tau);
  return smooth_rank1(delta_sequence(data.X, data.y, m), data.n(), m, tau, kernel);
}

CoefCurve beta_pilot(const RegressionData& data, int m, double tau, const KernelSpec& kernel) {
  check_window(data.n(), m);
  check_tau(tau);
  return pilot_from_stats(diff_stats(data, m), data.n(), data.p(), tau, kernel);
}

DebiasedFit debiased_fit(const RegressionData& data, int m, double tau,
                         const KernelSpec& kernel) {
  const int n = data.n(), p = data.p();
  check_window(n, m);
  check_tau(tau);
  DiffStats ds = diff_stats(data, m);
  DebiasedFit fit;
  fit.acute = smooth_rank1(ds.delta, n, m, tau, kernel);
  fit.pilot = pilot_from_stats(ds, n, p, tau, kernel);
  // The bias proxy A_{j,m} equals Delta_j of the pseudo-responses
  // y^_i = x_i' beta(t_i): expanding both windows shows the two sums are the
  // same telescoped average, so Sigma~ reuses the rank-1 smoother as-is.
  Eigen::VectorXd yhat(n);
  for (int i = 0; i < n; ++i) yhat[i] = data.X.row(i).dot(fit.pilot.values.row(i));
  fit.breve = smooth_rank1(delta_sequence(data.X, yhat, m), n, m, tau, kernel);
  fit.hat = fit.acute;
  for (int i = 0; i < n; ++i) fit.hat.values[i] -= fit.breve.values[i];
  return fit;
}

CovCurve debiased_sigma(const RegressionData& data, int m, double tau,
                        const KernelSpec& kernel) {
  return debiased_fit(data, m, tau, kernel).hat;
}

CovCurve threshold_pd(const CovCurve& curve, int n) {
  if (n < 1) throw Error(Errc::bad_config, "threshold_pd: n must be positive");
  const double floor_ev = 1.0 / n;
  CovCurve out = curve;
  for (auto& M : out.values) {
    Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor_ev);
    Eigen::MatrixXd rec = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    M = 0.5 * (rec + rec.transpose());
  }
  return out;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() < -1e-10)
    throw Error(Errc::not_psd, "matrix_sqrt_psd: eigenvalue below -1e-10");
  for (int k = 0; k < lam.size(); ++k) lam[k] = std::sqrt(std::max(lam[k], 0.0));
  Eigen::MatrixXd rec = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (rec + rec.transpose());
}

CovCurve matrix_sqrt_curve(const CovCurve& curve) {
  CovCurve out = curve;
  for (auto& M : out.values) M = matrix_sqrt_psd(M);
  return out;
}

} // namespace lrcov
