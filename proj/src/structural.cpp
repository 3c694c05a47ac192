#include "lrcov/structural.hpp"

#include <algorithm>
#include <cmath>

#include "bootstrap_util.hpp"
#include "lrcov/estimator.hpp"
#include "lrcov/parallel.hpp"
#include "lrcov/rng.hpp"
#include "lrcov/tuning.hpp"

namespace lrcov {

Eigen::VectorXd ols_fit(const RegressionData& data) {
  if (data.n() < data.p())
    throw Error(Errc::singular_design, "fewer observations than regressors");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  if (qr.rank() < data.p())
    throw Error(Errc::singular_design, "design matrix is rank deficient");
  return qr.solve(data.y);
}

double tn_statistic(const RegressionData& data) {
  const int n = data.n(), p = data.p();
  const Eigen::VectorXd beta = ols_fit(data);
  const double root_n = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(p);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = data.y[i] - data.X.row(i).dot(beta);
    cum += data.X.row(i).transpose() * e;
    best = std::max(best, cum.norm() / root_n);
  }
  return best;
}

std::vector<double> bootstrap_fr(const RegressionData& data, const CovCurve& sigma_half,
                                 int B, std::uint64_t seed, int threads) {
  const int n = data.n(), p = data.p();
  if (B < 1) throw Error(Errc::bad_config, "bootstrap replicate count B must be >= 1");
  if (sigma_half.n() != n || sigma_half.p() != p)
    throw Error(Errc::bad_config, "sigma_half curve does not match the data dimensions");
  const int m = sigma_half.m;
  if (m < 1 || m > n - m + 1)
    throw Error(Errc::bad_config, "sigma_half carries an invalid difference window");

  // Lambda^(i/n) Lambda^{-1}(1) for the anchored comparison, i = m..n-m+1.
  std::vector<Eigen::MatrixXd> anchor(n - 2 * m + 2);
  {
    Eigen::MatrixXd run = Eigen::MatrixXd::Zero(p, p);
    std::vector<Eigen::MatrixXd> prefix(n);
    for (int i = 1; i <= n; ++i) {
      run.selfadjointView<Eigen::Lower>().rankUpdate(data.X.row(i - 1).transpose(), 1.0 / n);
      prefix[i - 1] = run.selfadjointView<Eigen::Lower>();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(prefix[n - 1]);
    if (!lu.isInvertible())
      throw Error(Errc::singular_design, "Lambda^(1) is singular");
    const Eigen::MatrixXd lam_inv = lu.inverse();
    for (int i = m; i <= n - m + 1; ++i) anchor[i - m] = prefix[i - 1] * lam_inv;
  }

  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> draws(B);
  parallel_for(B, threads, [&](int r) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(r)}));
    Eigen::MatrixXd psi(n - m + 1, p);
    Eigen::VectorXd run = Eigen::VectorXd::Zero(p);
    for (int j = 1; j <= n - m + 1; ++j) {
      run += sigma_half.values[j - 1] * rng.normal_vector(p);
      psi.row(j - 1) = run;
    }
    const Eigen::VectorXd tail = psi.row(n - m).transpose();
    double best = 0.0;
    for (int i = m; i <= n - m + 1; ++i) {
      const double v = (psi.row(i - 1).transpose() - anchor[i - m] * tail).norm() / root_n;
      best = std::max(best, v);
    }
    draws[r] = best;
  });
  return draws;
}

TestReport structural_test(const RegressionData& data, const StructuralConfig& config) {
  if (config.B < 1) throw Error(Errc::bad_config, "B must be >= 1");
  if (config.auto_tune) {
    if (config.m || config.tau)
      throw Error(Errc::bad_config, "auto_tune and explicit m/tau are mutually exclusive");
  } else if (!config.m || !config.tau) {
    throw Error(Errc::bad_config, "either set both m and tau or enable auto_tune");
  }

  int m = 0;
  double tau = 0.0;
  if (config.auto_tune) {
    TuningSelection sel =
        mv_select(data, grid_default(data.n()), Criterion::structural, config.B_mv,
                  Rng::derive(config.seed, {1}), config.kernel, -1.0, -1.0, config.threads);
    m = sel.m_star;
    tau = sel.tau_star;
  } else {
    m = *config.m;
    tau = *config.tau;
  }

  const CovCurve sigma = threshold_pd(debiased_sigma(data, m, tau, config.kernel), data.n());
  const CovCurve shalf = matrix_sqrt_curve(sigma);

  TestReport report;
  report.bootstrap_draws =
      bootstrap_fr(data, shalf, config.B, Rng::derive(config.seed, {2}), config.threads);
  std::sort(report.bootstrap_draws.begin(), report.bootstrap_draws.end());
  report.statistic = tn_statistic(data);
  report.p_value = detail::upper_p_value(report.bootstrap_draws, report.statistic);
  for (double alpha : config.levels)
    report.reject_at[alpha] =
        detail::reject_at_level(report.bootstrap_draws, report.statistic, alpha);
  report.tuning = {m,        tau,         0.0, 0.0, kernel_name(config.kernel),
                   config.B, config.seed, config.auto_tune};
  return report;
}

} // namespace lrcov
